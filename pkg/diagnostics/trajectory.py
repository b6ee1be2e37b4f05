"""Trajectories, parabola fits and the Ehrenfest residual."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from core.errors import DegenerateTimes, NormFloor, ValidationError
from diagnostics.measures import NORM_FLOOR
from solutions.frame import FrameParams
from solutions.profiles import RealProfile, centred_first_4th

logger = logging.getLogger(__name__)

SOURCES = ("centroid", "peak", "minimum", "source", "custom")


@dataclass(frozen=True)
class Trajectory:
    """Positions over strictly increasing times, tagged by how they were measured"""
    times: np.ndarray
    positions: np.ndarray
    norms: np.ndarray
    source: str = "centroid"

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        positions = np.asarray(self.positions, dtype=float)
        norms = np.asarray(self.norms, dtype=float) if self.norms is not None else np.full_like(times, np.nan)
        if not (times.shape == positions.shape == norms.shape) or times.ndim != 1:
            raise ValidationError("trajectory arrays must have equal lengths", invariant="equal lengths")
        steps = np.diff(times)
        if np.any(steps == 0.0):
            raise DegenerateTimes("trajectory times are not distinct")
        if np.any(steps < 0.0):
            raise ValidationError("trajectory times must be strictly increasing", invariant="times increasing")
        if self.source not in SOURCES:
            raise ValidationError(f"unknown trajectory source {self.source!r}", invariant=f"source in {SOURCES}")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "norms", norms)

    @classmethod
    def from_record(cls, record, source: str = "centroid") -> "Trajectory":
        positions = record.centroids if source == "centroid" else record.peaks
        return cls(np.asarray(record.times), np.asarray(positions), np.asarray(record.norms), source)

    def __len__(self):
        return self.times.size

    def between(self, t_lo: float, t_hi: float) -> "Trajectory":
        mask = (self.times >= t_lo) & (self.times <= t_hi)
        return Trajectory(self.times[mask], self.positions[mask], self.norms[mask], self.source)

    def shifted(self, offset: float) -> "Trajectory":
        return Trajectory(self.times, self.positions + offset, self.norms, self.source)


@dataclass(frozen=True)
class ParabolaFit:
    """x(t) = x0 + v0 t + (acc / 2) t^2"""
    x0: float
    v0: float
    acc: float
    rms_residual: float
    samples: int = 0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.x0 + self.v0 * t + 0.5 * self.acc * t * t

    def to_dict(self) -> Dict[str, Any]:
        return {"x0": self.x0, "v0": self.v0, "acc": self.acc, "rms_residual": self.rms_residual,
                "samples": self.samples}


def fit_parabola(traj: Trajectory) -> ParabolaFit:
    """
    Least-squares parabola through a trajectory

    The fit runs on centred and scaled times with a QR factorisation, then maps
    the coefficients back to the original time origin.

    Raises:
        DegenerateTimes: fewer than 3 distinct times
    """
    t = traj.times
    x = traj.positions
    finite = np.isfinite(x)
    t, x = t[finite], x[finite]
    if t.size < 3 or np.unique(t).size < 3:
        raise DegenerateTimes(f"parabola fit needs >= 3 distinct times, got {np.unique(t).size}",
                              samples=int(t.size))

    mid = float(t.mean())
    half = float(np.max(np.abs(t - mid)))
    s = (t - mid) / half
    basis = np.column_stack([np.ones_like(s), s, s * s])
    q, r = np.linalg.qr(basis)
    c0, c1, c2 = solve_triangular(r, q.T @ x)

    acc = 2.0 * c2 / half ** 2
    v0 = c1 / half - 2.0 * c2 * mid / half ** 2
    x0 = c0 - c1 * mid / half + c2 * mid * mid / half ** 2
    residual = x - (c0 + c1 * s + c2 * s * s)
    rms = float(np.sqrt(np.mean(residual ** 2)))
    return ParabolaFit(x0=float(x0), v0=float(v0), acc=float(acc), rms_residual=rms, samples=int(t.size))


def ehrenfest_residual(record, v_real: RealProfile, frame: Optional[FrameParams] = None,
                       v_real_d1: Optional[RealProfile] = None, floor: float = NORM_FLOOR) -> np.ndarray:
    """
    Violation of the Ehrenfest theorem at interior record times

    r(t_i) = D2<x>(t_i) + <dV_R/dx>(t_i) / N(t_i), with D2 the centred second
    difference of the centroid series and <dV_R/dx> = sum V_R'(x - x_c) |Psi|^2 dx.

    Args:
        record: PropagationRecord with stored fields at uniform times
        v_real: real potential in the comoving frame
        frame: frame the potential moves with (static when omitted)
        v_real_d1: analytic dV_R/dq; a 4th-order difference of v_real otherwise
        floor: norm floor

    Returns:
        Residuals at times[1:-1]
    """
    frame = frame or FrameParams(0.0)
    times = np.asarray(record.times, dtype=float)
    if times.size < 3 or len(record.fields) != times.size:
        raise ValidationError("Ehrenfest residual needs >= 3 recorded fields", invariant=">= 3 centroids")
    steps = np.diff(times)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise ValidationError("second differences need uniform record times; use fit_parabola instead",
                              invariant="uniform record times")
    force = v_real_d1 or centred_first_4th(v_real, 1e-3)

    centroids = np.empty(times.size)
    mean_force = np.empty(times.size)
    for i, snapshot in enumerate(record.fields):
        density = snapshot.density
        n = float(np.sum(density) * snapshot.grid.dx)
        if not n > floor:
            raise NormFloor(f"norm {n:.3g} below floor at t={times[i]:.4g}", t=float(times[i]))
        x = snapshot.grid.x
        centroids[i] = np.sum(x * density) * snapshot.grid.dx / n
        grad = np.asarray(force(x - frame.x_c(times[i])), dtype=float)
        mean_force[i] = np.sum(grad * density) * snapshot.grid.dx / n

    h = steps[0]
    accel = (centroids[2:] - 2.0 * centroids[1:-1] + centroids[:-2]) / (h * h)
    return accel + mean_force[1:-1]
