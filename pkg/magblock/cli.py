# cli.py

import logging

import typer
from rich.console import Console
from rich.logging import RichHandler

from magblock.commands import dynamics, history, init, optimize, sweep

# --key value overrides arrive in ctx.args
OVERRIDES = {"allow_extra_args": True, "ignore_unknown_options": True}

app = typer.Typer(help="Magnon and photon blockade simulator: g2 sweeps, dynamics and optimum search.")


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Show debug logging."),
):
    setup_logging(logging.DEBUG if verbose else logging.WARNING)


def setup_logging(level: int):
    logger = logging.getLogger("magblock")
    logger.setLevel(level)
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        logger.addHandler(RichHandler(console=Console(stderr=True), show_path=False))


app.command("init", help="Write a default magblock.json config.")(init.initialize_project)
app.command("history", help="Show the run history of an output directory.")(history.history)
app.command("sweep-delta", context_settings=OVERRIDES)(sweep.sweep_delta)
app.command("dephasing", context_settings=OVERRIDES)(sweep.dephasing)
app.command("g2tau", context_settings=OVERRIDES)(dynamics.g2tau)
app.command("evolve", context_settings=OVERRIDES)(dynamics.evolve)
app.command("optimize", context_settings=OVERRIDES)(optimize.optimize)

if __name__ == "__main__":
    app()
