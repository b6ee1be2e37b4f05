"""
Residuals of the master equations and of full space-time solutions.

    G^2 - psi^3 (psi'' + 2 (mu - a q - V_R) psi)          (profile constraint)
    V_I - G' / (2 psi^2)                                (gain/loss constraint)
    i Psi_t - [-Psi_xx / 2 + (V_R + i V_I + sigma_nl |Psi|^p) Psi]
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import PsiFloor, ValidationError
from propagation.grid import Grid1D
from propagation.potential import ComovingPotential, NonlinearTerm, nonlinear_potential
from solutions.constants import PSI_FLOOR
from solutions.frame import FrameParams
from solutions.profiles import AuxiliaryG, EnvelopeProfile, RealProfile
from solutions.synthesis import radicand

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ResidualReport:
    """L_inf / grid-weighted L2 size of a residual"""
    l_inf: float
    l2: float
    sample_count: int
    grid_step: float
    derivative_scheme: str
    convergence_order: Optional[float] = None
    skipped: int = 0

    def with_order(self, order: Optional[float]) -> "ResidualReport":
        return ResidualReport(self.l_inf, self.l2, self.sample_count, self.grid_step, self.derivative_scheme,
                              order, self.skipped)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "l_inf": self.l_inf,
            "l2": self.l2,
            "sample_count": self.sample_count,
            "grid_step": self.grid_step,
            "derivative_scheme": self.derivative_scheme,
            "convergence_order": self.convergence_order,
            "skipped": self.skipped,
        }


def _sample_step(q: np.ndarray) -> float:
    if q.size < 2:
        return 1.0
    return float(np.median(np.abs(np.diff(np.sort(q)))))


def _report(residual: np.ndarray, step: float, scheme: str, skipped: int = 0) -> ResidualReport:
    r = np.abs(np.asarray(residual))
    return ResidualReport(
        l_inf=float(r.max()) if r.size else 0.0,
        l2=float(np.sqrt(np.sum(r ** 2) * step)),
        sample_count=int(r.size),
        grid_step=step,
        derivative_scheme=scheme,
        skipped=skipped,
    )


def ode_residual_G(psi: EnvelopeProfile, g: AuxiliaryG, v_real: RealProfile, frame: FrameParams,
                   samples: Sequence[float]) -> ResidualReport:
    """Residual G^2 - psi^3 (psi'' + 2 (mu - a q - V_R) psi) at the samples"""
    q = np.asarray(samples, dtype=float)
    residual = np.asarray(g.value(q), dtype=float) ** 2 - radicand(psi, v_real, frame, q)
    return _report(residual, _sample_step(q), psi.derivative_scheme)


def ode_residual_VI(g: AuxiliaryG, psi: EnvelopeProfile, v_imag: RealProfile, samples: Sequence[float],
                    psi_floor: float = PSI_FLOOR, derivative_scheme: Optional[str] = None) -> ResidualReport:
    """
    Residual V_I - G' / (2 psi^2) at the samples

    Samples with |psi| below psi_floor are skipped and counted.

    Raises:
        PsiFloor: when every sample falls below the floor
    """
    q = np.asarray(samples, dtype=float)
    p = np.asarray(psi.value(q), dtype=float)
    keep = np.abs(p) >= psi_floor
    skipped = int((~keep).sum())
    if not keep.any():
        raise PsiFloor(f"all {q.size} samples have |psi| < {psi_floor:g}", skipped=skipped)
    if skipped:
        logger.warning(f"Skipped {skipped} sample(s) with |psi| < {psi_floor:g}")
    q, p = q[keep], p[keep]
    residual = np.asarray(v_imag(q), dtype=float) - np.asarray(g.derivative(q), dtype=float) / (2.0 * p * p)
    return _report(residual, _sample_step(q), derivative_scheme or psi.derivative_scheme, skipped)


def pde_residual(wave, potential: ComovingPotential, nonlinear: Optional[NonlinearTerm], grid: Grid1D,
                 t: float, dt_fd: float = 1e-3, order: int = 2) -> ResidualReport:
    """
    Finite-difference residual of the evolution equation at time t

    Space derivatives use h = grid.dx; the wave sampler is evaluated at shifted
    points so no boundary closure is involved.

    Args:
        wave: sampler (x, t) -> complex Psi
        potential: comoving potential
        nonlinear: optional nonlinear term
        grid: sample grid
        t: time
        dt_fd: time step of the centred difference
        order: 2 (3-point stencils) or 4 (5-point stencils)

    Returns:
        ResidualReport
    """
    if order not in (2, 4):
        raise ValidationError(f"stencil order must be 2 or 4, got {order}", invariant="order in {2, 4}")
    x = grid.x
    h = grid.dx
    psi = wave(x, t)

    if order == 2:
        psi_t = (wave(x, t + dt_fd) - wave(x, t - dt_fd)) / (2.0 * dt_fd)
        psi_xx = (wave(x + h, t) - 2.0 * psi + wave(x - h, t)) / (h * h)
    else:
        psi_t = (-wave(x, t + 2 * dt_fd) + 8.0 * wave(x, t + dt_fd)
                 - 8.0 * wave(x, t - dt_fd) + wave(x, t - 2 * dt_fd)) / (12.0 * dt_fd)
        psi_xx = (-wave(x + 2 * h, t) + 16.0 * wave(x + h, t) - 30.0 * psi
                  + 16.0 * wave(x - h, t) - wave(x - 2 * h, t)) / (12.0 * h * h)

    u = potential.lab(x, t) + nonlinear_potential(nonlinear, psi)
    residual = 1j * psi_t - (-0.5 * psi_xx + u * psi)
    return _report(residual, h, f"centered-fd({order}, dx={h:g}, dt={dt_fd:g})")


def estimate_order(steps: Sequence[float], errors: Sequence[float]) -> Optional[float]:
    """Slope of log(error) against log(step); None below 3 usable levels"""
    h = np.asarray(steps, dtype=float)
    e = np.asarray(errors, dtype=float)
    ok = (e > 0) & np.isfinite(e)
    if ok.sum() < 3:
        return None
    slope, _ = np.polyfit(np.log(h[ok]), np.log(e[ok]), 1)
    return float(slope)


def ladder_grid(window: Tuple[float, float], step: float) -> Grid1D:
    lo, hi = window
    return Grid1D(lo, hi, max(16, int(round((hi - lo) / step))))


def pde_residual_ladder(wave, potential: ComovingPotential, nonlinear: Optional[NonlinearTerm],
                        window: Tuple[float, float], t: float, steps: Sequence[float],
                        order: int = 2) -> List[ResidualReport]:
    """
    pde_residual with dx = dt_fd = h over a refinement ladder

    The last report carries the convergence order estimated from all levels.
    """
    if len(steps) < 3:
        raise ValidationError(f"a refinement ladder needs >= 3 levels, got {len(steps)}", invariant=">= 3 levels")
    reports = [pde_residual(wave, potential, nonlinear, ladder_grid(window, h), t, dt_fd=h, order=order)
               for h in steps]
    rate = estimate_order([r.grid_step for r in reports], [r.l_inf for r in reports])
    reports[-1] = reports[-1].with_order(rate)
    return reports
