from pathlib import Path

from ...core.config import RunConfig
from ...types.errors import InvalidInputError


def load_config(path: Path | None) -> RunConfig:
    """The config file's settings, or the defaults without a file"""
    if path is None:
        return RunConfig()
    return RunConfig.load_toml(path)


def resolve_output(flag: Path | None, configured: Path | None, option: str) -> Path:
    """
    The output file from the command line, else from the config.

    :raises InvalidInputError: If neither names one
    """
    path = flag or configured
    if path is None:
        raise InvalidInputError(f"No output file, use {option} or set it in the [output] config section")
    return path
