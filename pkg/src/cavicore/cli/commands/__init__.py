import logging
from pathlib import Path

import typer

from ..app import app, app_state
from ..utils.error_hook import setup_global_error_logging
from ...lib.log import setup_logging

# Import commands
from . import synth, fit, model, sweep, qtheo

__all__ = ['synth', 'fit', 'model', 'sweep', 'qtheo']


@app.callback()
def setup(
        ctx: typer.Context,
        verbose: int = typer.Option(
            0, "--verbose", "-v",
            count=True,
            help="More log output, repeat for debug messages",
        ),
        quiet: bool = typer.Option(
            False, "--quiet", "-q",
            help="Only log errors and skip summaries",
        ),
        no_color: bool = typer.Option(
            False, "--no-color",
            help="Plain log output without rich rendering",
        ),
        error_log: Path | None = typer.Option(
            None, "--error-log",
            help="Write the traceback of unexpected errors to this file",
            dir_okay=False,
        ),
):
    """
    Cross-polarized reflectance of photonic crystal nanocavities: model, synthesize and fit spectra
    """
    if ctx.resilient_parsing:
        return

    # If no subcommand is provided, show complete help like --help
    if ctx.invoked_subcommand is None:
        typer.echo(ctx.get_help())
        raise typer.Exit(0)

    if quiet:
        level = logging.ERROR
    elif verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    app_state.log_level = level
    app_state.color = not no_color
    setup_logging(level, color=not no_color)

    if error_log is not None:
        setup_global_error_logging(error_log)
