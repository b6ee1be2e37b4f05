"""
Propagation package for accelwave.

This package contains the time-evolution engine:
- grid: periodic grid and complex wave fields
- potential: comoving potentials, nonlinear term, edge absorber
- split_step: Strang split-step Fourier scheme
- crank_nicolson: Crank-Nicolson scheme with periodic closure
- propagator: time-stepping driver and run records
"""

from propagation.grid import Grid1D, ComplexWaveField
from propagation.potential import ComovingPotential, NonlinearTerm, Absorber, pt_symmetric
from propagation.split_step import step_splitstep
from propagation.crank_nicolson import step_crank_nicolson
from propagation.propagator import PropagatorConfig, PropagationRecord, propagate

__all__ = [
    'Grid1D',
    'ComplexWaveField',
    'ComovingPotential',
    'NonlinearTerm',
    'Absorber',
    'pt_symmetric',
    'step_splitstep',
    'step_crank_nicolson',
    'PropagatorConfig',
    'PropagationRecord',
    'propagate',
]
