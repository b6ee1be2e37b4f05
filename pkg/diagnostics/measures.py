"""Snapshot-level measurements on complex wave fields."""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from core.errors import NormFloor, ValidationError

logger = logging.getLogger(__name__)

NORM_FLOOR = 1e-12
DEGENERACY_TOL = 1e-12


def norm(field) -> float:
    """L2 mass sum |Psi|^2 dx"""
    return float(np.sum(np.abs(field.amplitudes) ** 2) * field.grid.dx)


def centroid(field, floor: float = NORM_FLOOR) -> float:
    """
    Centre of mass <x> = sum x |Psi|^2 dx / N

    Raises:
        NormFloor: when N <= floor, i.e. the centre of mass cannot be defined
    """
    n = norm(field)
    if not n > floor:
        raise NormFloor(f"norm {n:.3g} is below the floor {floor:.1e}; centroid undefined", norm=n, t=field.t)
    return float(np.sum(field.grid.x * field.density) * field.grid.dx / n)


@dataclass(frozen=True)
class PeakResult:
    position: float
    index: int
    value: float
    degenerate: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"position": self.position, "index": self.index, "value": self.value, "degenerate": self.degenerate}


def peak_position(field, mode: str = "max", window: Optional[Tuple[float, float]] = None) -> PeakResult:
    """
    Extremum of |Psi|^2 refined by 3-point parabolic interpolation

    Ties resolve to the leftmost sample; the result is flagged degenerate when
    the three largest samples (smallest for mode="min") agree within 1e-12.

    Args:
        field: wave field
        mode: "max" for the main lobe, "min" for a density notch
        window: optional (lo, hi) search window in x

    Returns:
        PeakResult
    """
    if mode not in ("max", "min"):
        raise ValidationError(f"peak mode must be 'max' or 'min', got {mode!r}", invariant="mode in {max, min}")
    grid = field.grid
    density = field.density
    score = density if mode == "max" else -density

    if window is None:
        indices = np.arange(grid.n)
    else:
        indices = np.flatnonzero(grid.window_mask(*window))
        if indices.size == 0:
            raise ValidationError(f"search window {window} contains no grid points", invariant="window within grid")

    local = score[indices]
    j = int(np.argmax(local))
    i = int(indices[j])

    top = np.sort(local)[-3:] if local.size >= 3 else local
    degenerate = bool(top.max() - top.min() < DEGENERACY_TOL)
    if degenerate:
        return PeakResult(position=float(grid.x[i]), index=i, value=float(density[i]), degenerate=True)

    if window is None:
        left, right = score[(i - 1) % grid.n], score[(i + 1) % grid.n]
    elif 0 < j < local.size - 1:
        left, right = local[j - 1], local[j + 1]
    else:
        return PeakResult(position=float(grid.x[i]), index=i, value=float(density[i]), degenerate=False)

    curvature = left - 2.0 * score[i] + right
    offset = 0.0 if curvature == 0.0 else 0.5 * (left - right) / curvature
    offset = float(np.clip(offset, -0.5, 0.5))
    return PeakResult(position=float(grid.x[i] + offset * grid.dx), index=i, value=float(density[i]),
                      degenerate=False)


def intensity_flatness(field, window: Tuple[float, float], target: float = 1.0) -> float:
    """max over the window of | |Psi|^2 - target |"""
    lo, hi = window
    if not field.grid.contains(lo, hi):
        raise ValidationError(f"window [{lo:g}, {hi:g}] lies outside the grid "
                              f"[{field.grid.x_min:g}, {field.grid.x_max:g}]", invariant="window within grid")
    _, values = field.windowed(lo, hi)
    if values.size == 0:
        raise ValidationError(f"window [{lo:g}, {hi:g}] contains no grid points", invariant="window within grid")
    return float(np.max(np.abs(np.abs(values) ** 2 - target)))


def local_wavenumber(field, workers: Optional[int] = None, rel_floor: float = 1e-12) -> np.ndarray:
    """Im(Psi* dPsi/dx) / |Psi|^2 with a spectral derivative; NaN where |Psi|^2 is negligible"""
    psi = field.amplitudes
    dpsi = field.grid.spectral_derivative(psi, workers=workers)
    density = np.abs(psi) ** 2
    floor = rel_floor * max(float(density.max()), np.finfo(float).tiny)
    with np.errstate(divide="ignore", invalid="ignore"):
        k_loc = np.imag(np.conj(psi) * dpsi) / density
    return np.where(density > floor, k_loc, np.nan)


def source_position(field, frame_velocity: float, window: Tuple[float, float],
                    workers: Optional[int] = None) -> float:
    """
    Position where the local wavenumber equals the frame velocity a t

    This is the zero of G, the source of the internal flow of a constant-intensity
    wave. When the difference does not change sign inside the window (the
    positive branch), its minimum is returned instead.

    Args:
        field: wave field
        frame_velocity: a t
        window: (lo, hi) search window in x

    Returns:
        Source position in x
    """
    mask = field.grid.window_mask(*window)
    x = field.grid.x[mask]
    diff = local_wavenumber(field, workers=workers)[mask] - frame_velocity
    good = np.isfinite(diff)
    x, diff = x[good], diff[good]
    if x.size < 3:
        raise ValidationError(f"window {window} holds fewer than 3 usable points", invariant="window within grid")

    crossings = np.flatnonzero(np.sign(diff[:-1]) * np.sign(diff[1:]) < 0)
    if crossings.size:
        centre = 0.5 * (window[0] + window[1])
        c = int(crossings[np.argmin(np.abs(x[crossings] - centre))])
        return float(x[c] - diff[c] * (x[c + 1] - x[c]) / (diff[c + 1] - diff[c]))

    mag = np.abs(diff)
    j = int(np.argmin(mag))
    if 0 < j < x.size - 1:
        curvature = mag[j - 1] - 2.0 * mag[j] + mag[j + 1]
        if curvature > 0.0:
            return float(x[j] + 0.5 * (mag[j - 1] - mag[j + 1]) / curvature * (x[1] - x[0]))
    return float(x[j])


def gain_loss_summary(v_imag_samples: Sequence[float], dx: float, tol: float = 1e-14) -> Dict[str, Any]:
    """
    Integral and sign structure of a sampled V_I

    Returns:
        {integral, gain_fraction, loss_fraction, character} with character one of
        gain-only, loss-only, mixed, neutral
    """
    v = np.asarray(v_imag_samples, dtype=float)
    gain = v > tol
    loss = v < -tol
    if not gain.any() and not loss.any():
        character = "neutral"
    elif gain.any() and loss.any():
        character = "mixed"
    else:
        character = "gain-only" if gain.any() else "loss-only"
    return {
        "integral": float(np.sum(v) * dx),
        "gain_fraction": float(gain.mean()) if v.size else 0.0,
        "loss_fraction": float(loss.mean()) if v.size else 0.0,
        "character": character,
    }
