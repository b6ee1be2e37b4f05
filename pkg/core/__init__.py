"""
Core package for accelwave.

This package contains core functionality:
- config_manager: Manages user settings (.env overrides included)
- errors: Exception hierarchy
- utils: Logging, tables and JSON helpers
"""

from core.config_manager import ConfigManager
from core.errors import AccelwaveError
from core.utils import (
    setup_logging, format_number, format_duration,
    print_table, build_table, save_json_file, load_json_file
)

__all__ = [
    'ConfigManager',
    'AccelwaveError',
    'setup_logging',
    'format_number',
    'format_duration',
    'print_table',
    'build_table',
    'save_json_file',
    'load_json_file',
]
