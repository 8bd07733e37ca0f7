# magblock/commands/common.py

from pathlib import Path
from typing import Callable, List, Optional, Tuple

import typer

from magblock.core import history_manager
from magblock.core.config import RunConfig, parse_overrides, resolve_config
from magblock.core.errors import ComputationError, ConfigError, DimensionError, ParameterError

CONFIG_OPTION_HELP = "Config file (flat JSON, 'key = value' lines, or a CSV written by magblock)."

EXIT_USAGE = 2
EXIT_COMPUTATION = 3

# Body of a command: takes the resolved config, returns (written files, details for the run history).
CommandBody = Callable[[RunConfig], Tuple[List[Path], dict]]


def run_command(name: str, ctx: typer.Context, config_path: Optional[Path], body: CommandBody):
    """
    Resolves the config, runs the command body and records the run. Errors
    exit with code 2 (configuration) or 3 (computation).
    """
    config = None
    try:
        config = resolve_config(config_path, parse_overrides(ctx.args))
        outputs, details = body(config)
    except (ConfigError, ParameterError, DimensionError) as e:
        typer.echo(f"❌ Invalid configuration: {e}", err=True)
        _record(config, name, "failed", details={"error": str(e)})
        raise typer.Exit(code=EXIT_USAGE)
    except ComputationError as e:
        typer.echo(f"❌ Computation failed: {e}", err=True)
        _record(config, name, "failed", details={"error": str(e)})
        raise typer.Exit(code=EXIT_COMPUTATION)

    _record(config, name, "success", outputs, details)
    for path in outputs:
        typer.echo(f"✅ Wrote {path}")


def _record(config: Optional[RunConfig], name: str, status: str, outputs=(), details=None):
    if config is None:
        return
    record = history_manager.new_record(name, status, outputs, details)
    history_manager.add_run_record(Path(config.output), record)


def output_dir(config: RunConfig) -> Path:
    path = Path(config.output)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"Cannot create output directory '{path}': {e}") from e
    return path


def tag(value: float) -> str:
    """File-name friendly rendering of a parameter value."""
    return f"{value:.3e}".replace("+", "")


def dephasing_variants(config: RunConfig, gamma_p: float) -> List[Tuple[str, str]]:
    """(dephasing target, file name suffix) pairs to run; a single unlabelled run when gamma_p is zero."""
    targets = config.dephasing_targets()
    if gamma_p == 0:
        return [(targets[0], "")]
    return [(target, f"_{target}") for target in targets]
