# magblock/commands/optimize.py

from pathlib import Path
from typing import Optional

import typer

from magblock.commands.common import CONFIG_OPTION_HELP, output_dir, run_command
from magblock.core.amplitudes import interference_condition
from magblock.core.config import RunConfig
from magblock.core.csv_writer import write_csv
from magblock.core.errors import ComputationError
from magblock.core.optimizer import find_optimum


def optimize(
    ctx: typer.Context,
    config_path: Optional[Path] = typer.Option(None, "--config", "-c", help=CONFIG_OPTION_HELP),
):
    """
    Searches the (Delta, lambda) box for the deepest g2 dip and reports it.
    """
    run_command("optimize", ctx, config_path, _optimize)


def _optimize(config: RunConfig):
    out = output_dir(config)
    params = config.system_params()
    delta_bounds = (config.delta_min, config.delta_max)
    lambda_bounds = (config.lambda_min, config.lambda_max)
    outputs, details = [], {}

    for step, mode in enumerate(config.modes(), start=1):
        typer.echo(f"Step {step}: Searching the {mode.value} optimum in Delta {list(delta_bounds)} omega_b, "
                   f"lambda {list(lambda_bounds)} omega_b...")
        optimum = find_optimum(params, mode, delta_bounds, lambda_bounds)
        typer.echo(f"   grid {optimum.grid_shape[0]}x{optimum.grid_shape[1]}, {optimum.iterations} refinement rounds, "
                   f"brackets {optimum.delta_bracket:.1e} (Delta) / {optimum.lambda_bracket:.1e} (lambda)")
        typer.echo(f"   Delta_opt = {optimum.delta_opt:.4f} omega_b")
        typer.echo(f"   lambda_opt = {optimum.lambda_opt:.4e} omega_b")
        typer.echo(f"   g2_min = {optimum.g2_min:.6e}")

        try:
            roots = interference_condition(params, mode, delta_bounds)
        except ComputationError as e:
            typer.echo(f"⚠️ Could not solve the interference condition: {e}")
            roots = []
        if roots:
            listed = ", ".join(f"(Delta = {d:.4f}, lambda = {lam / params.omega_b:.4e})" for d, lam in roots)
            typer.echo(f"   interference condition solutions: {listed}")
        else:
            typer.echo("   interference condition has no real solution in the Delta bounds")
        if optimum.predicted is not None:
            typer.echo(f"   nearest solution inside the lambda bounds: Delta = {optimum.predicted[0]:.4f}, "
                       f"lambda = {optimum.predicted[1]:.4e}")
        typer.echo(f"   Kerr strength mu = {optimum.kerr_strength:.4f} (Delta_opt - mu = "
                   f"{optimum.delta_opt - optimum.kerr_strength / params.omega_b:+.4f} omega_b)")

        rows = [(r, d, lam, log_g2) for r, d, lam, log_g2 in optimum.trace]
        path = write_csv(out / f"optimize_{mode.value}_trace.csv",
                         ["round", "delta_over_omega_b", "lambda_over_omega_b", "log10_g2"], rows, config,
                         metadata={"mode": mode.value, "delta_opt": repr(optimum.delta_opt),
                                   "lambda_opt": repr(optimum.lambda_opt), "g2_min": repr(optimum.g2_min)})
        outputs.append(path)
        details[mode.value] = {"delta_opt": optimum.delta_opt, "lambda_opt": optimum.lambda_opt,
                               "g2_min": optimum.g2_min, "iterations": optimum.iterations}
    return outputs, details
