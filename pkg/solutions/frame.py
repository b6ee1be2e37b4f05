"""Accelerating-frame parameters and the time-dependent phase S(t)."""

import math
import numbers
from dataclasses import dataclass
from typing import Any, Dict

from core.errors import ValidationError


@dataclass(frozen=True)
class FrameParams:
    """
    Constant-acceleration frame q = x - a t^2 / 2 with real frame constant mu

    Args:
        a: acceleration (hbar = m = 1 units)
        mu: real frame constant
    """
    a: float
    mu: float = 0.0

    def __post_init__(self):
        if isinstance(self.mu, complex) or isinstance(self.a, complex):
            raise ValidationError(f"frame constants must be real, got a={self.a!r}, mu={self.mu!r}",
                                  invariant="mu is real")
        if not isinstance(self.a, numbers.Real) or not math.isfinite(self.a):
            raise ValidationError(f"acceleration must be finite, got {self.a!r}", invariant="a is finite")
        if not isinstance(self.mu, numbers.Real) or not math.isfinite(self.mu):
            raise ValidationError(f"mu must be a finite real, got {self.mu!r}", invariant="mu is real")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "mu", float(self.mu))

    def x_c(self, t):
        """Comoving trajectory x_c(t) = a t^2 / 2"""
        return 0.5 * self.a * t * t

    def velocity(self, t):
        """Frame velocity dx_c/dt = a t"""
        return self.a * t

    def with_mu(self, mu: float) -> "FrameParams":
        return FrameParams(self.a, mu)

    def to_dict(self) -> Dict[str, Any]:
        return {"a": self.a, "mu": self.mu}


def s_of_t(frame: FrameParams, t):
    """
    Time-dependent phase with dS/dt = (dx_c/dt)^2 / 2 - mu and S(0) = 0

    Args:
        frame: frame parameters
        t: time (scalar or array)

    Returns:
        S(t) = a^2 t^3 / 6 - mu t
    """
    return frame.a * frame.a * t ** 3 / 6.0 - frame.mu * t
