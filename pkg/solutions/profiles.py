"""Envelope and auxiliary-function profiles evaluable on any grid."""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

import numpy as np

# q -> real profile values (scalar or array in, same shape out)
RealProfile = Callable[[Any], Any]

# centred finite-difference step used when no analytic derivative is known
DEFAULT_FD_STEP = 1e-4


def zero_profile(q):
    return np.zeros_like(np.asarray(q, dtype=float))


def as_output(q, values):
    """Return a float for scalar input and an array otherwise"""
    if np.ndim(q) == 0:
        return float(np.asarray(values))
    return np.asarray(values, dtype=float)


def centred_first(f: RealProfile, h: float) -> RealProfile:
    def d1(q):
        q = np.asarray(q, dtype=float)
        return (f(q + h) - f(q - h)) / (2.0 * h)
    return d1


def centred_second(f: RealProfile, h: float) -> RealProfile:
    def d2(q):
        q = np.asarray(q, dtype=float)
        return (f(q + h) - 2.0 * f(q) + f(q - h)) / (h * h)
    return d2


def centred_first_4th(f: RealProfile, h: float) -> RealProfile:
    """Fourth-order centred first derivative"""
    def d1(q):
        q = np.asarray(q, dtype=float)
        return (-f(q + 2 * h) + 8.0 * f(q + h) - 8.0 * f(q - h) + f(q - 2 * h)) / (12.0 * h)
    return d1


@dataclass(frozen=True)
class EnvelopeProfile:
    """
    Real envelope psi(q) with its first and second derivatives

    fd_step is None when d1 and d2 are analytic, otherwise the centred
    finite-difference step they were built with.
    """
    value: RealProfile
    d1: RealProfile
    d2: RealProfile
    fd_step: Optional[float] = None

    @classmethod
    def from_function(cls, f: RealProfile, h: float = DEFAULT_FD_STEP) -> "EnvelopeProfile":
        """Wrap a bare function; derivatives come from centred differences with step h"""
        return cls(value=f, d1=centred_first(f, h), d2=centred_second(f, h), fd_step=h)

    @classmethod
    def constant(cls, level: float = 1.0) -> "EnvelopeProfile":
        return cls(value=lambda q: np.full_like(np.asarray(q, dtype=float), level),
                   d1=zero_profile, d2=zero_profile)

    @classmethod
    def from_table(cls, q_samples, psi_samples, degree: int = 5) -> "EnvelopeProfile":
        """Interpolating spline through tabulated (q, psi) samples"""
        from scipy.interpolate import make_interp_spline

        order = np.argsort(q_samples)
        spline = make_interp_spline(np.asarray(q_samples, dtype=float)[order],
                                    np.asarray(psi_samples, dtype=float)[order], k=degree)
        return cls(value=spline, d1=spline.derivative(1), d2=spline.derivative(2))

    @property
    def derivative_scheme(self) -> str:
        if self.fd_step is None:
            return "analytic"
        return f"centered-fd(2, {self.fd_step:g})"

    def consistency_error(self, samples, h: float = 1e-3) -> Dict[str, float]:
        """Max deviation of d1/d2 from centred differences of value at the samples"""
        q = np.asarray(samples, dtype=float)
        fd1 = centred_first(self.value, h)(q)
        fd2 = centred_second(self.value, h)(q)
        return {
            "d1": float(np.max(np.abs(fd1 - self.d1(q)))),
            "d2": float(np.max(np.abs(fd2 - self.d2(q)))),
        }


@dataclass(frozen=True)
class AuxiliaryG:
    """
    Signed auxiliary function G(q) and its derivative

    branch_rule records how the sign of the square root was chosen.
    """
    value: RealProfile
    derivative: RealProfile
    branch_rule: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def zero(cls) -> "AuxiliaryG":
        return cls(value=zero_profile, derivative=zero_profile, branch_rule={"kind": "identically-zero"})
