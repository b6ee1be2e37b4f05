"""
Lab-frame assembly of accelerating solutions.

    Psi(x, t) = exp(i a t q + i Phi(q) + i S(t)) psi(q),    q = x - a t^2 / 2

with Phi(q) the integral of G/psi^2 from the anchor q0 = 0.
"""

import logging
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from core.errors import QuadratureFailure, ValidationError
from propagation.grid import ComplexWaveField, Grid1D
from solutions.constants import NONLINEAR_SHIFT_COEFFICIENT
from solutions.families import SolutionFamily
from solutions.frame import s_of_t
from solutions.profiles import as_output

logger = logging.getLogger(__name__)

QUAD_TOL = 1e-10

# (x, t) -> complex samples
WaveSampler = Callable[[np.ndarray, float], np.ndarray]


def _quad_interval(integrand, lo: float, hi: float) -> float:
    if lo == hi:
        return 0.0
    value, abserr, *rest = quad(integrand, lo, hi, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200, full_output=1)
    if not np.isfinite(value) or abserr > max(1e3 * QUAD_TOL, 1e-8 * abs(value)):
        raise QuadratureFailure(f"phase quadrature on [{lo:.6g}, {hi:.6g}] did not converge "
                                f"(estimate {value:.6g}, error {abserr:.3g})", interval=[lo, hi], abserr=abserr)
    return value


def phase_integral(family: SolutionFamily, q):
    """
    Integral of G/psi^2 from 0 to q

    Uses the family's antiderivative when it has one; otherwise adaptive
    quadrature accumulated over consecutive sample intervals outward from 0.
    """
    closed = family.phase_closed_form(q)
    if closed is not None:
        return closed

    def integrand(s):
        p = float(family.psi(s))
        return float(family.g(s)) / (p * p)

    qa = np.atleast_1d(np.asarray(q, dtype=float))
    out = np.empty_like(qa)
    for side in (1.0, -1.0):
        idx = np.flatnonzero(qa >= 0.0) if side > 0 else np.flatnonzero(qa < 0.0)
        if idx.size == 0:
            continue
        order = idx[np.argsort(side * qa[idx])]
        total, previous = 0.0, 0.0
        for i in order:
            total += _quad_interval(integrand, previous, qa[i])
            previous = qa[i]
            out[i] = total
    logger.debug(f"Phase integral by quadrature at {qa.size} point(s) for {family.TAG}")
    return as_output(q, out.reshape(np.shape(q)))


def assemble_lab_frame(family: SolutionFamily, grid: Grid1D, t: float,
                       s_mu: Optional[float] = None) -> ComplexWaveField:
    """
    Sample the lab-frame wave on a grid

    Args:
        family: solution family
        grid: spatial grid
        t: time
        s_mu: frame constant used in S(t) (defaults to the family's mu; the
            nonlinear constant-intensity wave uses the shifted mu here)

    Returns:
        ComplexWaveField at time t
    """
    return ComplexWaveField(grid, lab_wave(family, s_mu)(grid.x, t), t)


def lab_wave(family: SolutionFamily, s_mu: Optional[float] = None) -> WaveSampler:
    """Space-time sampler (x, t) -> Psi(x, t) of the exact wave"""
    frame = family.frame
    s_frame = frame if s_mu is None else frame.with_mu(s_mu)

    def sample(x, t: float) -> np.ndarray:
        q = np.asarray(x, dtype=float) - frame.x_c(t)
        phase = frame.velocity(t) * q + np.asarray(phase_integral(family, q)) + s_of_t(s_frame, t)
        return np.exp(1j * phase) * np.asarray(family.psi(q), dtype=float)

    return sample


def nonlinear_mu_shift(mu: float, sigma_nl: float, p: float,
                       c_shift: float = NONLINEAR_SHIFT_COEFFICIENT) -> float:
    """
    Shifted frame constant for a constant-intensity wave under sigma_nl |Psi|^p

    With |Psi| = 1 the nonlinear term is the constant sigma_nl for every p, so
    the shift does not depend on p.
    """
    if not np.isfinite(p) or p <= 0:
        raise ValidationError(f"nonlinear exponent must be a positive real, got p={p!r}", invariant="p > 0")
    return float(mu + c_shift * sigma_nl)
