# magblock/commands/sweep.py

from pathlib import Path
from typing import Optional

import typer

from magblock.commands.common import CONFIG_OPTION_HELP, dephasing_variants, output_dir, run_command, tag
from magblock.core.config import RunConfig
from magblock.core.csv_writer import write_curves
from magblock.core.lindblad import convergence_delta
from magblock.core.optimizer import find_dips, scan


def sweep_delta(
    ctx: typer.Context,
    config_path: Optional[Path] = typer.Option(None, "--config", "-c", help=CONFIG_OPTION_HELP),
):
    """
    g2(0) versus the detuning Delta, one CSV per (mode, lambda) pair.
    """
    run_command("sweep-delta", ctx, config_path, _sweep_delta)


def _sweep_delta(config: RunConfig):
    out = output_dir(config)
    base = config.system_params()
    dephasing = base.gamma_p > 0
    outputs, details = [], {}

    typer.echo(f"Step 1: Sweeping Delta over [{config.delta_min}, {config.delta_max}] omega_b "
               f"({config.n_points} points, engine {config.engine})...")
    for mode in config.modes():
        for lam in config.lambdas:
            for target, suffix in dephasing_variants(config, base.gamma_p):
                outputs.extend(_sweep_one(config, out, base.replace(lam=lam * base.omega_b), mode, lam, target,
                                          suffix, dephasing, details))
    return outputs, details


def _sweep_one(config: RunConfig, out: Path, params, mode, lam: float, target: str, suffix: str,
               dephasing: bool, details: dict):
    curves = {}
    for engine in config.engines():
        curves[f"g2_{engine}"] = scan(
            params, "delta", (config.delta_min, config.delta_max), config.n_points, mode,
            engine=engine, dim_m=config.dim_m, dim_c=config.dim_c, include_dephasing=dephasing,
            dephasing_target=target, workers=config.workers,
        )
    metadata = {"mode": mode.value, "lambda_over_omega_b": repr(lam)}
    if dephasing:
        metadata["dephasing_target"] = target
    path = write_curves(out / f"sweep_delta_{mode.value}_lam{tag(lam)}{suffix}.csv", "delta_over_omega_b", curves,
                        config, metadata=metadata)

    label = f"{mode.value}, lambda = {lam:.3e} omega_b" + (f", dephasing on {target}" if dephasing else "")
    for name, curve in curves.items():
        best = curve.argmin()
        typer.echo(f"   {label}, {name}: minimum {best.g2:.6e} at Delta = {best.x:.4f} omega_b ({curve.gaps} gaps)")
        details[f"{mode.value}/{tag(lam)}{suffix}/{name}"] = {"delta_min_g2": best.x, "g2_min": best.g2}
    if len(curves) == 2:
        deviation = _max_relative_deviation(curves["g2_analytic"], curves["g2_numeric"])
        typer.echo(f"   analytic vs numeric: largest relative deviation {deviation:.3e}")

    if config.convergence_check and "g2_numeric" in curves:
        typer.echo("Step 2: Checking truncation convergence at the numeric minimum...")
        x = curves["g2_numeric"].argmin().x
        change = convergence_delta(
            params.with_detuning(x * params.omega_b), mode, (config.dim_m, config.dim_c),
            (config.dim_m + 2, config.dim_c + 2), dephasing, target,
        )
        typer.echo(f"   g2 changes by {change:.3e} (relative) from {config.dim_m}x{config.dim_c} "
                   f"to {config.dim_m + 2}x{config.dim_c + 2}")
    return [path]


def _max_relative_deviation(analytic, numeric) -> float:
    deviations = [abs(b.g2 - a.g2) / abs(a.g2) for a, b in zip(analytic.points, numeric.points)
                  if not (a.is_gap or b.is_gap) and a.g2 > 0]
    return max(deviations) if deviations else float("nan")


def dephasing(
    ctx: typer.Context,
    config_path: Optional[Path] = typer.Option(None, "--config", "-c", help=CONFIG_OPTION_HELP),
):
    """
    Numeric Delta sweeps with pure dephasing, one CSV per (mode, dephasing
    target, gamma_p). Target `both` runs the cavity and magnon channels as
    two separately labelled families.
    """
    run_command("dephasing", ctx, config_path, _dephasing)


def _dephasing(config: RunConfig):
    out = output_dir(config)
    params = config.system_params()
    outputs, details = [], {}

    typer.echo(f"Step 1: Sweeping Delta for gamma_p in {list(config.gamma_p_list)} kappa "
               f"(dephasing on {config.dephasing_target})...")
    for mode in config.modes():
        for target in config.dephasing_targets():
            _dephasing_family(config, out, params, mode, target, outputs, details)
    return outputs, details


def _dephasing_family(config: RunConfig, out: Path, params, mode, target: str, outputs: list, details: dict):
    dip_values = []
    for gamma_p in config.gamma_p_list:
        curve = scan(
            params.replace(gamma_p=gamma_p), "delta", (config.delta_min, config.delta_max), config.n_points,
            mode, engine="numeric", dim_m=config.dim_m, dim_c=config.dim_c, include_dephasing=True,
            dephasing_target=target, workers=config.workers,
        )
        path = write_curves(out / f"dephasing_{mode.value}_{target}_gp{tag(gamma_p)}.csv", "delta_over_omega_b",
                            {"g2_numeric": curve}, config,
                            metadata={"mode": mode.value, "dephasing_target": target,
                                      "gamma_p_over_kappa": repr(gamma_p)})
        outputs.append(path)

        best = curve.argmin()
        dip_values.append(best.g2)
        dips = ", ".join(f"{d.x:.3f} ({d.kind}, {d.g2:.3e})" for d in find_dips(curve))
        typer.echo(f"   {mode.value}, dephasing on {target}, gamma_p = {gamma_p:.3g} kappa: deepest dip "
                   f"{best.g2:.6e} at Delta = {best.x:.4f} omega_b; dips at {dips or 'none'}")
        details[f"{mode.value}/{target}/{tag(gamma_p)}"] = {"delta": best.x, "g2": best.g2}

    ordered = sorted(zip(config.gamma_p_list, dip_values))
    rising = all(b[1] >= a[1] for a, b in zip(ordered, ordered[1:]))
    mark = "✅" if rising else "⚠️"
    typer.echo(f"{mark} {mode.value} dip values with dephasing on {target} "
               f"{'do not decrease' if rising else 'decrease'} with increasing gamma_p")
    details[f"{mode.value}/{target}/non_decreasing"] = rising
