"""
Experiments package for accelwave.

This package contains the scenario plumbing:
- scenario: pydantic scenario models
- config_parser: the [section] / key = value config format
- presets: shipped scenario configs
- output: CSV, JSON and PGM writers
- runner: build -> propagate -> diagnose -> emit
"""

from experiments.scenario import ScenarioSpec, TruncationWindow
from experiments.config_parser import parse_config, load_config, serialize
from experiments.presets import list_presets, load_preset
from experiments.output import emit_density_pgm, read_pgm
from experiments.runner import RunResult, ScenarioRunner, run_scenario

__all__ = [
    'ScenarioSpec',
    'TruncationWindow',
    'parse_config',
    'load_config',
    'serialize',
    'list_presets',
    'load_preset',
    'emit_density_pgm',
    'read_pgm',
    'RunResult',
    'ScenarioRunner',
    'run_scenario',
]
