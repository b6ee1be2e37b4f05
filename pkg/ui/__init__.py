"""
UI package for accelwave.

This package contains the interactive interface:
- terminal_ui: command shell and result printers
"""

from ui.terminal_ui import AccelwaveTerminalUI, print_result

__all__ = [
    'AccelwaveTerminalUI',
    'print_result',
]
