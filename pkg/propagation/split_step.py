"""Strang split-step Fourier scheme."""

from typing import Optional

import numpy as np
from scipy import fft as sfft

from core.errors import Overflow
from propagation.grid import ComplexWaveField
from propagation.potential import ComovingPotential, NonlinearTerm, nonlinear_potential

GAIN_CEILING = 1e12


def check_ceiling(amplitudes: np.ndarray, t: float, ceiling: float = GAIN_CEILING) -> None:
    peak = float(np.max(np.abs(amplitudes))) if amplitudes.size else 0.0
    if not peak <= ceiling:
        raise Overflow(f"max|Psi| = {peak:.3g} exceeds the gain ceiling {ceiling:.3g} at t={t:.6g}",
                       t=t, max_abs=peak, ceiling=ceiling)


def step_splitstep(field: ComplexWaveField, potential: ComovingPotential, nonlinear: Optional[NonlinearTerm],
                   t: float, dt: float, workers: Optional[int] = None,
                   ceiling: float = GAIN_CEILING) -> ComplexWaveField:
    """
    Advance one Strang step: half potential, full kinetic, half potential

    The potential is frozen at t + dt/2. The imaginary part enters the potential
    factor as the amplitude gain exp(V_I dt / 2).

    Args:
        field: field at time t
        potential: comoving potential
        nonlinear: optional sigma_nl |Psi|^p term
        t: current time
        dt: step
        workers: scipy.fft worker count
        ceiling: max|Psi| above which Overflow is raised

    Returns:
        Field at t + dt
    """
    grid = field.grid
    u_mid = potential.lab(grid.x, t + 0.5 * dt)

    psi = field.amplitudes * np.exp(-0.5j * dt * (u_mid + nonlinear_potential(nonlinear, field.amplitudes)))
    kinetic = np.exp(-0.5j * dt * grid.k ** 2)
    psi = sfft.ifft(kinetic * sfft.fft(psi, workers=workers), workers=workers)
    psi = psi * np.exp(-0.5j * dt * (u_mid + nonlinear_potential(nonlinear, psi)))

    check_ceiling(psi, t + dt, ceiling)
    return ComplexWaveField(grid, psi, t + dt)
