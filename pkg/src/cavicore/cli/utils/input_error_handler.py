"""Single-line diagnostics for configuration and input errors in CLI commands."""
import tomllib

from typer import Exit, secho

from ...types.errors import CavicoreError, SpectrumFormatError


class InputErrorHandler:
    """Context manager turning input errors into a red line on stderr and exit code 1."""

    def __init__(self, source: str | None = None):
        """
        :param source: File name put in front of file format errors
        """
        self.source = source

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        if exc_type is None:
            return False

        if issubclass(exc_type, SpectrumFormatError) and self.source:
            message = f"{self.source}: {exc_value}"
        elif issubclass(exc_type, tomllib.TOMLDecodeError):
            message = f"Invalid config file: {exc_value}"
        elif issubclass(exc_type, OSError):
            message = f"{exc_value.strerror or exc_value}: {exc_value.filename}" \
                if exc_value.filename else str(exc_value)
        elif issubclass(exc_type, CavicoreError):
            message = str(exc_value)
        else:
            return False  # Let other exceptions propagate

        secho(f"Error: {message}", fg="red", err=True)
        raise Exit(1)
