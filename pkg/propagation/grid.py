"""Periodic 1-D grid and complex wave fields sampled on it."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy import fft as sfft

from core.errors import NonFiniteField, ValidationError

logger = logging.getLogger(__name__)

MIN_POINTS = 16


@dataclass(frozen=True)
class Grid1D:
    """
    Uniform periodic grid x_j = x_min + j dx, j = 0..n-1, dx = (x_max - x_min) / n

    x_max is identified with x_min and is not a sample point.
    """
    x_min: float
    x_max: float
    n: int
    x: np.ndarray = field(init=False, repr=False, compare=False)
    k: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < MIN_POINTS:
            raise ValidationError(f"grid needs n >= {MIN_POINTS} points, got {self.n!r}", invariant="n >= 16")
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)) or self.x_max <= self.x_min:
            raise ValidationError(f"grid needs x_max > x_min, got [{self.x_min}, {self.x_max}]", invariant="dx > 0")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "x_min", float(self.x_min))
        object.__setattr__(self, "x_max", float(self.x_max))
        x = self.x_min + self.dx * np.arange(self.n)
        k = 2.0 * np.pi * sfft.fftfreq(self.n, d=self.dx)
        x.setflags(write=False)
        k.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "k", k)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def k_max(self) -> float:
        return np.pi / self.dx

    def contains(self, lo: float, hi: float) -> bool:
        return self.x_min <= lo and hi <= self.x_max

    def window_mask(self, lo: float, hi: float) -> np.ndarray:
        return (self.x >= lo) & (self.x <= hi)

    def refined(self, factor: float) -> "Grid1D":
        """Same domain with n scaled by factor (rounded to an even count)"""
        n = max(MIN_POINTS, int(round(self.n * factor / 2.0)) * 2)
        return Grid1D(self.x_min, self.x_max, n)

    def spectral_derivative(self, values: np.ndarray, order: int = 1, workers: Optional[int] = None) -> np.ndarray:
        """d^order/dx^order by multiplication with (i k)^order in Fourier space"""
        spectrum = sfft.fft(values, workers=workers)
        return sfft.ifft((1j * self.k) ** order * spectrum, workers=workers)

    def to_dict(self) -> Dict[str, Any]:
        return {"x_min": self.x_min, "x_max": self.x_max, "n": self.n, "dx": self.dx}


@dataclass
class ComplexWaveField:
    """Complex amplitudes Psi(x_j) on a grid at time t"""
    grid: Grid1D
    amplitudes: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.grid.n,):
            raise ValidationError(f"field length {self.amplitudes.shape} does not match grid n={self.grid.n}",
                                  invariant="length matches grid")
        self.check_finite()

    def check_finite(self, step: Optional[int] = None) -> None:
        bad = ~np.isfinite(self.amplitudes)
        if np.any(bad):
            first = int(np.argmax(bad))
            raise NonFiniteField(f"field has {int(bad.sum())} non-finite value(s), first at x={self.grid.x[first]:.6g}",
                                 t=self.t, step=step, count=int(bad.sum()))

    @classmethod
    def zeros(cls, grid: Grid1D, t: float = 0.0) -> "ComplexWaveField":
        return cls(grid, np.zeros(grid.n, dtype=complex), t)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.amplitudes)))

    def with_amplitudes(self, amplitudes: np.ndarray, t: Optional[float] = None) -> "ComplexWaveField":
        return ComplexWaveField(self.grid, amplitudes, self.t if t is None else t)

    def copy(self) -> "ComplexWaveField":
        return ComplexWaveField(self.grid, self.amplitudes.copy(), self.t)

    def windowed(self, lo: float, hi: float) -> Tuple[np.ndarray, np.ndarray]:
        mask = self.grid.window_mask(lo, hi)
        return self.grid.x[mask], self.amplitudes[mask]
