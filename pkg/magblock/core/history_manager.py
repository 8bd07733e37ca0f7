# magblock/core/history_manager.py

import json
import datetime
from pathlib import Path

import typer

HISTORY_FILE_NAME = "runs_history.json"


def _get_history_file_path(output_dir: Path) -> Path:
    """Returns the full path to the history file of an output directory."""
    return Path(output_dir) / HISTORY_FILE_NAME


def load_history(output_dir: Path) -> list:
    """Loads the run history of an output directory from its JSON file."""
    history_file = _get_history_file_path(output_dir)
    if not history_file.is_file():
        return []
    try:
        with open(history_file, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        typer.echo(f"Warning: History file in '{output_dir}' is corrupted ({e}). Starting with empty history.", err=True)
        return []
    except OSError as e:
        typer.echo(f"Warning: Could not load history in '{output_dir}': {e}. Starting with empty history.", err=True)
        return []


def save_history(output_dir: Path, history_data: list):
    """Saves the run history of an output directory to its JSON file."""
    history_file = _get_history_file_path(output_dir)
    try:
        history_file.parent.mkdir(parents=True, exist_ok=True)
        with open(history_file, 'w', encoding='utf-8') as f:
            json.dump(history_data, f, indent=2)
    except OSError as e:
        typer.echo(f"Error: Failed to save run history in '{output_dir}': {e}", err=True)


def new_record(command: str, status: str, outputs=(), details=None) -> dict:
    return {
        "timestamp": datetime.datetime.now().isoformat(),
        "command": command,
        "status": status,
        "outputs": [str(p) for p in outputs],
        "details": details or {},
    }


def add_run_record(output_dir: Path, record: dict):
    """Appends a run record to the history of an output directory."""
    history = load_history(output_dir)
    history.append(record)
    save_history(output_dir, history)
