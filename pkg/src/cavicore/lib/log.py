from datetime import datetime
import logging

# Try to import rich, but don't fail if not available
try:
    import rich
    import rich.logging
except ImportError:
    rich = None

__all__ = ['logger', 'setup_logging']

# Package logger, every module logs through a child of it
logger = logging.getLogger("cavicore")

if rich:
    class CavicoreRichHandler(rich.logging.RichHandler):
        """RichHandler on stderr, showing the module name instead of the source file"""

        def __init__(self, **kwargs):
            from rich.console import Console
            super().__init__(console=Console(stderr=True), **kwargs)

        # noinspection PyProtectedMember
        def render(self, *, record, traceback, message_renderable):
            time_format = None if self.formatter is None else self.formatter.datefmt
            return self._log_render(
                self.console,
                [message_renderable] if not traceback else [message_renderable, traceback],
                log_time=datetime.fromtimestamp(record.created),
                time_format=time_format,
                level=self.get_level_text(record),
                path=record.name.removeprefix("cavicore."),
                line_no=record.lineno,
                link_path=None,
            )


class CavicoreLogFormatter(logging.Formatter):
    """Plain one-line format: time, level, module and message"""

    def format(self, record: logging.LogRecord) -> str:
        record.short_name = record.name.removeprefix("cavicore.")
        return super().format(record)


def setup_logging(level: int = logging.WARNING, color: bool = True) -> logging.Logger:
    """
    Attach a single stderr handler to the package logger.

    Calling it again replaces the handler.

    :param level: Level of the package logger
    :param color: Use rich rendering when rich is installed
    :return: The package logger
    """
    if logger.hasHandlers():
        logger.handlers.clear()
    logger.setLevel(level)
    logger.propagate = False

    if rich and color:
        handler = CavicoreRichHandler(  # noqa
            show_time=True,
            show_level=True,
            show_path=True,
            omit_repeated_times=False,
            markup=False,
        )
        handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%H:%M:%S]"))
    else:
        handler = logging.StreamHandler()
        handler.setFormatter(CavicoreLogFormatter(
            "%(asctime)s %(levelname)-7s %(short_name)s: %(message)s",
            datefmt="[%Y-%m-%d %H:%M:%S]"))
    logger.addHandler(handler)
    return logger
