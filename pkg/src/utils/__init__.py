from .logger import setup_logging, get_logger
from .file_utils import load_json, write_csv, read_csv, write_json, format_number

__all__ = [
    'setup_logging',
    'get_logger',
    'load_json',
    'write_csv',
    'read_csv',
    'write_json',
    'format_number',
]
