"""Comoving complex potentials, the nonlinear term and the edge absorber."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence

import numpy as np

from core.errors import ValidationError
from solutions.frame import FrameParams
from solutions.profiles import RealProfile, zero_profile

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ComovingPotential:
    """
    Potential V_R(q) + i V_I(q) fixed in the accelerating frame

    In the lab frame U(x, t) = V(x - a t^2 / 2), which depends on t whenever a != 0.
    """
    v_real: RealProfile
    v_imag: RealProfile
    frame: FrameParams
    description: Dict[str, Any] = field(default_factory=dict, compare=False)

    @classmethod
    def from_family(cls, family) -> "ComovingPotential":
        return cls(v_real=family.v_real, v_imag=family.v_imag, frame=family.frame,
                   description={"family": family.TAG, "params": family.params()})

    @classmethod
    def free(cls) -> "ComovingPotential":
        return cls(v_real=zero_profile, v_imag=zero_profile, frame=FrameParams(0.0), description={"kind": "free"})

    @classmethod
    def uniform(cls, v_real: float = 0.0, v_imag: float = 0.0) -> "ComovingPotential":
        return cls(v_real=lambda q: np.full_like(np.asarray(q, dtype=float), v_real),
                   v_imag=lambda q: np.full_like(np.asarray(q, dtype=float), v_imag),
                   frame=FrameParams(0.0),
                   description={"kind": "uniform", "v_real": v_real, "v_imag": v_imag})

    def real_at(self, x, t: float) -> np.ndarray:
        return np.asarray(self.v_real(np.asarray(x, dtype=float) - self.frame.x_c(t)), dtype=float)

    def imag_at(self, x, t: float) -> np.ndarray:
        return np.asarray(self.v_imag(np.asarray(x, dtype=float) - self.frame.x_c(t)), dtype=float)

    def lab(self, x, t: float) -> np.ndarray:
        """U(x, t) = V_R(x - x_c(t)) + i V_I(x - x_c(t))"""
        return self.real_at(x, t) + 1j * self.imag_at(x, t)

    def max_gain(self, x, t: float) -> float:
        return float(np.max(np.abs(self.imag_at(x, t))))

    def to_dict(self) -> Dict[str, Any]:
        return {"frame": self.frame.to_dict(), **self.description}


def pt_symmetric(potential: ComovingPotential, x, t_samples: Sequence[float], atol: float = 1e-10) -> bool:
    """
    Check V_R(-x, -t) = V_R(x, t) and V_I(-x, -t) = -V_I(x, t) on a symmetric sample set

    Args:
        potential: comoving potential
        x: sample positions (mirrored internally)
        t_samples: times to check
        atol: absolute tolerance

    Returns:
        True when both relations hold at every sample
    """
    x = np.asarray(x, dtype=float)
    for t in t_samples:
        u_plus = potential.lab(x, t)
        u_minus = potential.lab(-x, -t)
        if not np.allclose(u_minus.real, u_plus.real, atol=atol, rtol=0.0):
            return False
        if not np.allclose(u_minus.imag, -u_plus.imag, atol=atol, rtol=0.0):
            return False
    return True


@dataclass(frozen=True)
class NonlinearTerm:
    """Intensity-dependent potential sigma_nl |Psi|^p"""
    sigma_nl: float
    p: float = 2.0

    def __post_init__(self):
        if not np.isfinite(self.sigma_nl):
            raise ValidationError(f"sigma_nl must be finite, got {self.sigma_nl!r}", invariant="sigma_nl is finite")
        if not np.isfinite(self.p) or self.p == 0:
            raise ValidationError(f"nonlinear exponent must be non-zero, got p={self.p!r}", invariant="p != 0")

    @property
    def active(self) -> bool:
        return self.sigma_nl != 0.0

    def __call__(self, amplitudes: np.ndarray) -> np.ndarray:
        return self.sigma_nl * np.abs(amplitudes) ** self.p

    def to_dict(self) -> Dict[str, Any]:
        return {"sigma_nl": self.sigma_nl, "p": self.p}


def nonlinear_potential(nonlinear: Optional[NonlinearTerm], amplitudes: np.ndarray) -> np.ndarray:
    if nonlinear is None or not nonlinear.active:
        return np.zeros(amplitudes.shape, dtype=float)
    return nonlinear(amplitudes)


@dataclass(frozen=True)
class Absorber:
    """
    Imaginary sink -i s r^4 on the outer layer of each edge

    r runs from 0 at the inner edge of the layer to 1 at the boundary.
    layer_width is a fraction of the domain length.
    """
    layer_width: float = 0.1
    strength: float = 5.0

    def __post_init__(self):
        if not 0.0 < self.layer_width < 0.5:
            raise ValidationError(f"absorber layer_width must lie in (0, 0.5), got {self.layer_width}",
                                  invariant="0 < layer_width < 0.5")
        if self.strength < 0.0:
            raise ValidationError(f"absorber strength must be >= 0, got {self.strength}", invariant="strength >= 0")

    def profile(self, grid) -> np.ndarray:
        width = self.layer_width * grid.length
        left = (grid.x_min + width - grid.x) / width
        right = (grid.x - (grid.x_max - width)) / width
        ramp = np.clip(np.maximum(left, right), 0.0, 1.0)
        return self.strength * ramp ** 4

    def damping(self, grid, dt: float) -> np.ndarray:
        """Per-step multiplicative factor exp(-s r^4 dt)"""
        return np.exp(-self.profile(grid) * dt)

    def interior(self, grid):
        width = self.layer_width * grid.length
        return grid.x_min + width, grid.x_max - width

    def to_dict(self) -> Dict[str, Any]:
        return {"layer_width": self.layer_width, "strength": self.strength}
