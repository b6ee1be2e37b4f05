"""
Crank-Nicolson scheme with a 3-point Laplacian on the periodic grid.

(1 + i dt/2 H) Psi_new = (1 - i dt/2 H) Psi_old with H frozen at t + dt/2 and
the nonlinear term lagged on Psi_old. The periodic corners are handled by a
Sherman-Morrison correction around a banded tridiagonal solve.
"""

import logging
from typing import Optional

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from core.errors import SolveFailure
from propagation.grid import ComplexWaveField
from propagation.potential import ComovingPotential, NonlinearTerm, nonlinear_potential
from propagation.split_step import GAIN_CEILING, check_ceiling

logger = logging.getLogger(__name__)


def apply_periodic_tridiagonal(diag: np.ndarray, off: complex, v: np.ndarray) -> np.ndarray:
    """(T v)_j = diag_j v_j + off (v_{j-1} + v_{j+1}) with periodic wrap"""
    return diag * v + off * (np.roll(v, 1) + np.roll(v, -1))


def solve_periodic_tridiagonal(diag: np.ndarray, off: complex, rhs: np.ndarray) -> np.ndarray:
    """
    Solve the cyclic system diag_j x_j + off (x_{j-1} + x_{j+1}) = rhs_j

    Args:
        diag: main diagonal
        off: constant off-diagonal (also the two corner entries)
        rhs: right-hand side

    Returns:
        Solution vector
    """
    n = diag.size
    gamma = -diag[0]
    corner = off

    main = np.array(diag, dtype=complex)
    main[0] -= gamma
    main[-1] -= corner * corner / gamma

    banded = np.zeros((3, n), dtype=complex)
    banded[0, 1:] = off
    banded[1, :] = main
    banded[2, :-1] = off

    u = np.zeros(n, dtype=complex)
    u[0] = gamma
    u[-1] = corner

    try:
        both = solve_banded((1, 1), banded, np.column_stack([rhs, u]), check_finite=False)
    except (LinAlgError, ValueError) as exc:
        raise SolveFailure(f"tridiagonal solve failed: {exc}") from exc

    y, z = both[:, 0], both[:, 1]
    # v = (1, 0, ..., 0, corner / gamma)
    denom = 1.0 + z[0] + corner * z[-1] / gamma
    if not np.isfinite(denom) or abs(denom) < 1e-14:
        raise SolveFailure(f"periodic correction is singular (1 + v.z = {denom:.3g})")
    factor = (y[0] + corner * y[-1] / gamma) / denom
    x = y - factor * z
    if not np.all(np.isfinite(x)):
        raise SolveFailure("tridiagonal solve produced non-finite values")
    return x


def step_crank_nicolson(field: ComplexWaveField, potential: ComovingPotential, nonlinear: Optional[NonlinearTerm],
                        t: float, dt: float, ceiling: float = GAIN_CEILING) -> ComplexWaveField:
    """
    Advance one Crank-Nicolson step

    Args:
        field: field at time t
        potential: comoving potential (frozen at t + dt/2)
        nonlinear: optional sigma_nl |Psi|^p term, evaluated on the old field
        t: current time
        dt: step
        ceiling: max|Psi| above which Overflow is raised

    Returns:
        Field at t + dt
    """
    grid = field.grid
    inv_dx2 = 1.0 / grid.dx ** 2
    u_mid = potential.lab(grid.x, t + 0.5 * dt) + nonlinear_potential(nonlinear, field.amplitudes)

    # H = -1/2 D2 + U: diagonal 1/dx^2 + U, neighbours -1/(2 dx^2)
    h_diag = inv_dx2 + u_mid
    h_off = -0.5 * inv_dx2

    rhs = apply_periodic_tridiagonal(1.0 - 0.5j * dt * h_diag, -0.5j * dt * h_off, field.amplitudes)
    psi = solve_periodic_tridiagonal(1.0 + 0.5j * dt * h_diag, 0.5j * dt * h_off, rhs)

    check_ceiling(psi, t + dt, ceiling)
    return ComplexWaveField(grid, psi, t + dt)
