import json
from pathlib import Path

import typer

from magblock.core import history_manager
from magblock.core.config import RunConfig


def history(
    output_dir: Path = typer.Argument(Path(RunConfig().output), help="Output directory whose runs to list."),
):
    """
    Prints the recorded runs of an output directory.
    """
    typer.echo(f"Retrieving run history for: '{output_dir}'...")
    records = history_manager.load_history(output_dir)
    if not records:
        typer.echo(f"No run history found in '{output_dir}'.")
        return
    typer.echo(json.dumps(records, indent=2))
