# magblock/commands/dynamics.py

from pathlib import Path
from typing import Optional

import numpy as np
import typer

from magblock.commands.common import CONFIG_OPTION_HELP, dephasing_variants, output_dir, run_command
from magblock.core.config import RunConfig
from magblock.core.csv_writer import write_csv
from magblock.core.errors import UnpopulatedModeError
from magblock.core.lindblad import (
    DensityMatrix,
    build_liouvillian,
    evolve as evolve_state,
    g2_tau,
    g2_zero,
    occupation,
    steady_state,
    trace_distance,
)
from magblock.core.operators import Mode


UNITY_BAND = (0.9, 1.1)
UNITY_WINDOW_US = (2.0, 3.0)


def g2tau(
    ctx: typer.Context,
    config_path: Optional[Path] = typer.Option(None, "--config", "-c", help=CONFIG_OPTION_HELP),
):
    """
    Stationary g2(tau) at the configured operating point (quantum regression).
    """
    run_command("g2tau", ctx, config_path, _g2tau)


def _g2tau(config: RunConfig):
    out = output_dir(config)
    params = config.system_params()
    tau_us = np.linspace(0.0, config.tau_max_us, config.n_tau)
    tau = np.array([config.us_to_kappa(t) for t in tau_us])
    outputs, details = [], {}

    typer.echo(f"Step 1: Solving g2(tau) up to {config.tau_max_us} us on a {config.dim_m}x{config.dim_c} truncation...")
    for mode in config.modes():
        for target, suffix in dephasing_variants(config, params.gamma_p):
            curve = g2_tau(params, tau, mode, config.dim_m, config.dim_c,
                           include_dephasing=params.gamma_p > 0, dephasing_target=target)
            g2 = np.array(curve.g2s)
            metadata = {"mode": mode.value, **curve.metadata}
            if suffix:
                metadata["dephasing_target"] = target
            path = write_csv(out / f"g2tau_{mode.value}{suffix}.csv", ["tau_us", "g2_tau"], list(zip(tau_us, g2)),
                             config, metadata=metadata)
            outputs.append(path)

            rising = bool(np.all(g2[1:] > g2[0]))
            window = (tau_us >= UNITY_WINDOW_US[0]) & (tau_us <= UNITY_WINDOW_US[1])
            in_band = bool(window.any() and np.all((g2[window] >= UNITY_BAND[0]) & (g2[window] <= UNITY_BAND[1])))
            label = mode.value + (f" (dephasing on {target})" if suffix else "")
            typer.echo(f"   {label}: g2(0) = {g2[0]:.6e}, g2(tau_max) = {g2[-1]:.6e}")
            typer.echo(f"{'✅' if rising else '⚠️'} g2(tau) {'rises above' if rising else 'does not stay above'} "
                       f"g2(0) for every sampled tau > 0")
            if window.any():
                typer.echo(f"{'✅' if in_band else '⚠️'} g2(tau) {'is' if in_band else 'is not'} within "
                           f"{list(UNITY_BAND)} for tau in {list(UNITY_WINDOW_US)} us")
            details[f"{mode.value}{suffix}"] = {"g2_zero": float(g2[0]), "rising": rising, "unity_band": in_band}
    return outputs, details


def evolve(
    ctx: typer.Context,
    config_path: Optional[Path] = typer.Option(None, "--config", "-c", help=CONFIG_OPTION_HELP),
):
    """
    Master-equation evolution from the vacuum: g2_m(0), populations and trace error over time.
    """
    run_command("evolve", ctx, config_path, _evolve)


def _g2_or_nan(rho: DensityMatrix, mode: Mode) -> float:
    try:
        return g2_zero(rho, mode)
    except UnpopulatedModeError:
        return float("nan")


def _evolve(config: RunConfig):
    out = output_dir(config)
    params = config.system_params()
    t_us = np.linspace(0.0, config.t_max_us, config.n_t)
    t = np.array([config.us_to_kappa(x) for x in t_us])
    outputs, details = [], {}

    for target, suffix in dephasing_variants(config, params.gamma_p):
        label = f" with dephasing on {target}" if suffix else ""
        typer.echo(f"Step 1: Building the Liouvillian ({config.dim_m}x{config.dim_c} truncation){label}...")
        liouvillian = build_liouvillian(params, config.dim_m, config.dim_c, params.gamma_p > 0, target)

        typer.echo(f"Step 2: Evolving the vacuum up to {config.t_max_us} us...")
        trajectory = evolve_state(liouvillian, DensityMatrix.vacuum(config.dim_m, config.dim_c), t)
        rows = [
            (time, _g2_or_nan(rho, Mode.MAGNON), occupation(rho, Mode.MAGNON), occupation(rho, Mode.CAVITY),
             rho.trace_error())
            for time, rho in zip(t_us, trajectory)
        ]
        metadata = {"initial_state": "vacuum", "method": "expm"}
        if suffix:
            metadata["dephasing_target"] = target
        path = write_csv(out / f"evolve{suffix}.csv",
                         ["t_us", "g2_m_zero", "population_m", "population_c", "trace_error"], rows, config,
                         metadata=metadata)
        outputs.append(path)

        typer.echo("Step 3: Comparing the final state with the steady state...")
        reports = [rho.report() for rho in trajectory]
        physical = all(r.ok() for r in reports)
        distance = trace_distance(trajectory[-1], steady_state(liouvillian))
        final_g2 = rows[-1][1]
        typer.echo(f"   g2_m(0) at t = {config.t_max_us} us: {final_g2:.6e}")
        typer.echo(f"   trace distance to the steady state: {distance:.3e}")
        typer.echo(f"{'✅' if physical else '⚠️'} trajectory {'stays' if physical else 'does not stay'} physical "
                   f"(max trace error {max(r.trace_error for r in reports):.2e}, "
                   f"min eigenvalue {min(r.min_eigenvalue for r in reports):.2e})")
        details[f"evolve{suffix}"] = {"final_g2_m": final_g2, "steady_state_distance": distance,
                                      "physical": physical}
    return outputs, details
