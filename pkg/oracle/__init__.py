"""
Oracle package for accelwave.

This package contains the numerical referee:
- residuals: master-equation and PDE residuals, refinement ladders
- adjudication: selection between candidate constants
"""

from oracle.residuals import (
    ResidualReport, ode_residual_G, ode_residual_VI, pde_residual, pde_residual_ladder
)
from oracle.adjudication import Claim, DecisionRecord, adjudicate

__all__ = [
    'ResidualReport',
    'ode_residual_G',
    'ode_residual_VI',
    'pde_residual',
    'pde_residual_ladder',
    'Claim',
    'DecisionRecord',
    'adjudicate',
]
