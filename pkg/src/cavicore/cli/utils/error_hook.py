import logging
import sys
import traceback
from pathlib import Path

logger = logging.getLogger(__name__)


def setup_global_error_logging(log_path: Path):
    """
    Write the traceback of an uncaught exception to a file before the default handling.

    The file is truncated at setup so it only ever holds the crash of the latest run.

    :param log_path: File receiving the traceback
    :return: The previous excepthook
    """
    log_path.parent.mkdir(parents=True, exist_ok=True)
    log_path.write_text("", encoding="utf-8")

    previous = sys.excepthook

    def write_and_forward(exc_type, exc_value, tb):
        log_path.write_text(''.join(traceback.format_exception(exc_type, exc_value, tb)), encoding="utf-8")
        logger.error("Unexpected %s, traceback written to %s", exc_type.__name__, log_path)
        previous(exc_type, exc_value, tb)

    sys.excepthook = write_and_forward
    return previous
