import typer
from pathlib import Path

from magblock.core.config import CONFIG_FILE_NAME, RunConfig, write_default_config


def initialize_project(
    project_path: Path = typer.Argument(
        Path("."),
        help="Directory to write the config into. Defaults to current directory."
    ),
):
    """
    Writes a magblock.json holding every config key at its default value.
    """
    typer.echo(f"Initializing magblock config in: {project_path.resolve()}")

    if not project_path.is_dir():
        typer.echo(f"❌ Error: '{project_path}' is not a directory.", err=True)
        raise typer.Exit(code=2)

    config_file_path = project_path / CONFIG_FILE_NAME

    if config_file_path.exists():
        overwrite = typer.confirm(
            f"A {CONFIG_FILE_NAME} file already exists at {config_file_path}. Overwrite it?"
        )
        if not overwrite:
            typer.echo("Initialization cancelled.")
            raise typer.Exit()

    try:
        write_default_config(config_file_path)
        typer.echo(f"✅ Created {CONFIG_FILE_NAME} at {config_file_path}")
    except OSError as e:
        typer.echo(f"❌ Error writing {CONFIG_FILE_NAME}: {e}", err=True)
        raise typer.Exit(code=2)

    defaults = RunConfig()
    typer.echo("\nNext steps:")
    typer.echo(f"- Review and customize {CONFIG_FILE_NAME} (rates in units of kappa, units = '{defaults.units}').")
    typer.echo(f"- Run 'magblock sweep-delta --config {CONFIG_FILE_NAME}' to reproduce the detuning scan.")
