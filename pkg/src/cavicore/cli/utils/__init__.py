from .error_hook import setup_global_error_logging
from .input_error_handler import InputErrorHandler
from .paths import resolve_output, load_config

__all__ = ['setup_global_error_logging', 'InputErrorHandler', 'resolve_output', 'load_config']
