"""
Diagnostics package for accelwave.

This package contains measurements on fields and records:
- measures: norm, centroid, peak, flatness, local wavenumber, gain/loss summary
- trajectory: trajectories, parabola fits, Ehrenfest residual
- comparison: error norms against exact solutions (import directly)
"""

from diagnostics.measures import (
    norm, centroid, peak_position, intensity_flatness,
    local_wavenumber, source_position, gain_loss_summary
)
from diagnostics.trajectory import Trajectory, ParabolaFit, fit_parabola, ehrenfest_residual

__all__ = [
    'norm',
    'centroid',
    'peak_position',
    'intensity_flatness',
    'local_wavenumber',
    'source_position',
    'gain_loss_summary',
    'Trajectory',
    'ParabolaFit',
    'fit_parabola',
    'ehrenfest_residual',
]
