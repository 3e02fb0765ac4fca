import logging
import sys
from dataclasses import dataclass

try:
    import typer
except ImportError:
    print("You need to install typer to run the cavicore CLI. Please run `pip install cavicore[cli]`.",
          file=sys.stderr)
    raise SystemExit(1)

__all__ = ["app", "app_state"]

app = typer.Typer(
    invoke_without_command=True,
    context_settings={"help_option_names": ["-h", "--help"]},
    rich_markup_mode="rich",
)


@dataclass(slots=True)
class AppState:
    """
    Settings of the current invocation, filled in by the global callback
    """
    log_level: int = logging.WARNING
    color: bool = True

    @property
    def quiet(self) -> bool:
        return self.log_level > logging.WARNING


app_state = AppState()
