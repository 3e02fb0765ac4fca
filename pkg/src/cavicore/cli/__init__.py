from typing import Sequence

import click

from .app import app
from . import commands

__all__ = ['app', 'main']


def main(argv: Sequence[str] | None = None) -> int:
    """
    Run the command line, returning the exit code instead of exiting.

    0 on success, 1 on configuration or input errors, 2 if `fit` rejected a peak or a fit did not
    converge.
    """
    try:
        result = app(args=list(argv) if argv is not None else None, prog_name="cavi", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return 1
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    return result if isinstance(result, int) else 0
