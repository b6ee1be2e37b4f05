"""
Exact self-accelerating solution families.

Every family is a frozen record describing the comoving-frame envelope psi(q),
the auxiliary function G(q) and the complex potential V_R(q) + i V_I(q) that
together satisfy

    G^2 = psi^3 (psi'' + 2 (mu - a q - V_R) psi),    V_I = G' / (2 psi^2)

with q = x - a t^2 / 2.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy.special import airy

from core.errors import InvalidRegion, ValidationError
from solutions.constants import (
    DARK_SOLITON_MU_SIGN, DARK_SOLITON_MU_SIGN_REJECTED, THRESHOLD_RTOL
)
from solutions.frame import FrameParams
from solutions.profiles import AuxiliaryG, EnvelopeProfile, RealProfile, as_output, zero_profile
from solutions.synthesis import SynthesisResult, synthesize

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)

TAGS = (
    "AiryFree",
    "ConstIntensityInvHarm",
    "ConstIntensityPowerLaw",
    "GaussianLocalized",
    "DarkSoliton",
    "Synthesized",
)


def _arr(q):
    return np.asarray(q, dtype=float)


def _require_finite(name: str, value: float) -> float:
    if isinstance(value, complex) or not math.isfinite(float(value)):
        raise ValidationError(f"{name} must be a finite real number, got {value!r}", invariant=f"{name} is finite")
    return float(value)


class SolutionFamily:
    """Base class for tagged solution families"""

    TAG = "Base"
    frame: FrameParams

    # envelope
    def psi(self, q):
        raise NotImplementedError

    def psi_d1(self, q):
        raise NotImplementedError

    def psi_d2(self, q):
        raise NotImplementedError

    # auxiliary function
    def g(self, q):
        raise NotImplementedError

    def g_d1(self, q):
        raise NotImplementedError

    # potential
    def v_real(self, q):
        return zero_profile(q)

    def v_real_d1(self, q):
        return zero_profile(q)

    def v_imag(self, q):
        raise NotImplementedError

    def phase_closed_form(self, q) -> Optional[np.ndarray]:
        """Integral of G/psi^2 from 0 to q, or None when only quadrature applies"""
        return None

    @property
    def right_branch_sign(self) -> float:
        """Sign of G on the right end of the line"""
        return 1.0

    @property
    def validity_interval(self) -> Tuple[float, float]:
        return (-math.inf, math.inf)

    def envelope(self) -> EnvelopeProfile:
        return EnvelopeProfile(value=self.psi, d1=self.psi_d1, d2=self.psi_d2)

    def aux_g(self) -> AuxiliaryG:
        return AuxiliaryG(value=self.g, derivative=self.g_d1, branch_rule=self.branch_rule())

    def branch_rule(self) -> Dict[str, Any]:
        return {"kind": "closed-form", "right_sign": self.right_branch_sign}

    def params(self) -> Dict[str, Any]:
        raise NotImplementedError

    def closed_forms(self) -> Dict[str, str]:
        return {}

    def notes(self) -> Dict[str, Any]:
        return {}


@dataclass(frozen=True)
class AiryFree(SolutionFamily):
    """Hermitian free-particle Airy wave: psi = Ai((2a)^(1/3) (q - mu/a)), G = 0"""
    a: float
    mu: float = 0.0
    frame: FrameParams = field(init=False, repr=False)

    TAG = "AiryFree"

    def __post_init__(self):
        a = _require_finite("a", self.a)
        if a == 0.0:
            raise ValidationError("AiryFree needs a != 0", invariant="a != 0")
        object.__setattr__(self, "frame", FrameParams(a, self.mu))

    @property
    def scale(self) -> float:
        return float(np.cbrt(2.0 * self.frame.a))

    def _z(self, q):
        return self.scale * (_arr(q) - self.frame.mu / self.frame.a)

    def psi(self, q):
        ai, _, _, _ = airy(self._z(q))
        return as_output(q, ai)

    def psi_d1(self, q):
        _, aip, _, _ = airy(self._z(q))
        return as_output(q, self.scale * aip)

    def psi_d2(self, q):
        z = self._z(q)
        ai, _, _, _ = airy(z)
        return as_output(q, self.scale ** 2 * z * ai)

    def g(self, q):
        return as_output(q, zero_profile(q))

    def g_d1(self, q):
        return as_output(q, zero_profile(q))

    def v_real(self, q):
        return as_output(q, zero_profile(q))

    def v_imag(self, q):
        return as_output(q, zero_profile(q))

    def phase_closed_form(self, q):
        return as_output(q, zero_profile(q))

    def branch_rule(self):
        return {"kind": "identically-zero"}

    def params(self):
        return {"a": self.frame.a, "mu": self.frame.mu}

    def closed_forms(self):
        return {"psi": "Ai((2a)^(1/3) (q - mu/a))", "G": "0", "V_R": "0", "V_I": "0"}


@dataclass(frozen=True)
class ConstIntensityInvHarm(SolutionFamily):
    """
    Constant-intensity wave psi = 1 in V_R = -V0^2 q^2

    mu >= a^2 / (4 V0^2). At the threshold the smooth signed branch
    G = sqrt(2) (V0 q - a / (2 V0)) gives the constant V_I = V0 / sqrt(2).
    """
    V0: float
    a: float
    mu: float
    frame: FrameParams = field(init=False, repr=False)

    TAG = "ConstIntensityInvHarm"

    def __post_init__(self):
        v0 = _require_finite("V0", self.V0)
        if v0 == 0.0:
            raise ValidationError("ConstIntensityInvHarm needs V0 != 0", invariant="V0 != 0")
        frame = FrameParams(self.a, self.mu)
        threshold = self.threshold_for(v0, frame.a)
        if frame.mu < threshold - THRESHOLD_RTOL * max(1.0, threshold):
            raise ValidationError(
                f"mu = {frame.mu:g} is below a^2/(4 V0^2) = {threshold:g}; the square root argument "
                f"2(mu - a q + V0^2 q^2) would be negative",
                invariant="mu >= a^2/(4 V0^2)")
        object.__setattr__(self, "frame", frame)

    @staticmethod
    def threshold_for(V0: float, a: float) -> float:
        return a * a / (4.0 * V0 * V0)

    @property
    def threshold(self) -> float:
        return self.threshold_for(self.V0, self.frame.a)

    @property
    def at_threshold(self) -> bool:
        return abs(self.frame.mu - self.threshold) <= THRESHOLD_RTOL * max(1.0, self.threshold)

    def _radicand(self, q):
        q = _arr(q)
        return 2.0 * (self.frame.mu - self.frame.a * q + self.V0 ** 2 * q * q)

    def psi(self, q):
        return as_output(q, np.ones_like(_arr(q)))

    def psi_d1(self, q):
        return as_output(q, zero_profile(q))

    def psi_d2(self, q):
        return as_output(q, zero_profile(q))

    def g(self, q):
        if self.at_threshold:
            return as_output(q, SQRT2 * (self.V0 * _arr(q) - self.frame.a / (2.0 * self.V0)))
        return as_output(q, np.sqrt(self._radicand(q)))

    def g_d1(self, q):
        if self.at_threshold:
            return as_output(q, np.full_like(_arr(q), SQRT2 * self.V0))
        q = _arr(q)
        return as_output(q, (2.0 * self.V0 ** 2 * q - self.frame.a) / np.sqrt(self._radicand(q)))

    def v_real(self, q):
        q = _arr(q)
        return as_output(q, -self.V0 ** 2 * q * q)

    def v_real_d1(self, q):
        return as_output(q, -2.0 * self.V0 ** 2 * _arr(q))

    def v_imag(self, q):
        if self.at_threshold:
            return as_output(q, np.full_like(_arr(q), self.V0 / SQRT2))
        rad = self._radicand(q)
        if np.any(rad < 0):
            raise InvalidRegion("square-root argument 2(mu - a q + V0^2 q^2) is negative")
        q = _arr(q)
        return as_output(q, -(self.frame.a - 2.0 * self.V0 ** 2 * q) / (2.0 * np.sqrt(rad)))

    def phase_closed_form(self, q):
        q = _arr(q)
        a, v0 = self.frame.a, self.V0
        if self.at_threshold:
            return as_output(q, SQRT2 * (0.5 * v0 * q * q - a * q / (2.0 * v0)))
        # integral of sqrt(A q^2 + B q + C) with 4AC - B^2 > 0
        A, B, C = 2.0 * v0 * v0, -2.0 * a, 2.0 * self.frame.mu
        disc = 4.0 * A * C - B * B

        def antiderivative(s):
            root = np.sqrt(A * s * s + B * s + C)
            return ((2.0 * A * s + B) * root / (4.0 * A)
                    + disc / (8.0 * A ** 1.5) * np.arcsinh((2.0 * A * s + B) / math.sqrt(disc)))

        return as_output(q, antiderivative(q) - antiderivative(0.0))

    @property
    def right_branch_sign(self):
        return float(np.sign(self.V0)) if self.at_threshold else 1.0

    def branch_rule(self):
        if self.at_threshold:
            return {"kind": "smooth-signed-root", "right_sign": self.right_branch_sign,
                    "flip_points": [self.frame.a / (2.0 * self.V0 ** 2)]}
        return {"kind": "positive-root", "right_sign": 1.0}

    def params(self):
        return {"V0": self.V0, "a": self.frame.a, "mu": self.frame.mu}

    def closed_forms(self):
        if self.at_threshold:
            return {"psi": "1", "G": "sqrt(2) (V0 q - a/(2 V0))", "V_R": "-V0^2 q^2", "V_I": "V0/sqrt(2)"}
        return {"psi": "1", "G": "sqrt(2 (mu - a q + V0^2 q^2))", "V_R": "-V0^2 q^2",
                "V_I": "-(a - 2 V0^2 q) / (2 sqrt(2 (mu - a q + V0^2 q^2)))"}

    def notes(self):
        notes = {"threshold_mu": self.threshold, "at_threshold": self.at_threshold,
                 "gain_loss_integral_limit": -self.frame.a / (SQRT2 * abs(self.V0))}
        if self.at_threshold:
            notes["G_form_note"] = ("sqrt(2) V0 (q - a/(2 V0)) coincides with the smooth branch only at |V0| = 1; "
                                    "sqrt(2) (V0 q - a/(2 V0)) is used")
        return notes


@dataclass(frozen=True)
class ConstIntensityPowerLaw(SolutionFamily):
    """Constant-intensity wave in V_R = -a q - V0^2 q^n at mu = 0 (n even)"""
    V0: float
    n: int
    a: float
    frame: FrameParams = field(init=False, repr=False)

    TAG = "ConstIntensityPowerLaw"

    def __post_init__(self):
        _require_finite("V0", self.V0)
        if int(self.n) != self.n or self.n < 2 or int(self.n) % 2 != 0:
            raise ValidationError(f"n must be an even integer >= 2, got {self.n!r}", invariant="n even, n >= 2")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "frame", FrameParams(self.a, 0.0))

    @property
    def half(self) -> int:
        return self.n // 2

    def psi(self, q):
        return as_output(q, np.ones_like(_arr(q)))

    def psi_d1(self, q):
        return as_output(q, zero_profile(q))

    def psi_d2(self, q):
        return as_output(q, zero_profile(q))

    def g(self, q):
        return as_output(q, -SQRT2 * self.V0 * _arr(q) ** self.half)

    def g_d1(self, q):
        return as_output(q, -SQRT2 * self.V0 * self.half * _arr(q) ** (self.half - 1))

    def v_real(self, q):
        q = _arr(q)
        return as_output(q, -self.frame.a * q - self.V0 ** 2 * q ** self.n)

    def v_real_d1(self, q):
        q = _arr(q)
        return as_output(q, -self.frame.a - self.n * self.V0 ** 2 * q ** (self.n - 1))

    def v_imag(self, q):
        return as_output(q, -(self.n / (2.0 * SQRT2)) * self.V0 * _arr(q) ** (self.half - 1))

    def phase_closed_form(self, q):
        return as_output(q, -SQRT2 * self.V0 * _arr(q) ** (self.half + 1) / (self.half + 1))

    @property
    def right_branch_sign(self):
        return -float(np.sign(self.V0)) or 1.0

    def branch_rule(self):
        return {"kind": "negative-root", "right_sign": self.right_branch_sign,
                "G": "-sqrt(2) V0 q^(n/2)"}

    def params(self):
        return {"V0": self.V0, "n": self.n, "a": self.frame.a, "mu": 0.0}

    def closed_forms(self):
        return {"psi": "1", "G": "-sqrt(2) V0 q^(n/2)", "V_R": "-a q - V0^2 q^n",
                "V_I": "-(n / (2 sqrt(2))) V0 q^(n/2 - 1)"}

    def notes(self):
        return {"branch_dependence": "the leading minus sign of V_I follows from the negative root of G^2"}


@dataclass(frozen=True)
class GaussianLocalized(SolutionFamily):
    """Normalizable self-accelerating Gaussian in the purely imaginary potential V_I = -w^2 q^2 - a q + w/2"""
    omega: float
    a: float
    frame: FrameParams = field(init=False, repr=False)

    TAG = "GaussianLocalized"

    def __post_init__(self):
        w = _require_finite("omega", self.omega)
        if w <= 0.0:
            raise ValidationError(f"omega must be > 0, got {w:g}", invariant="omega > 0")
        a = _require_finite("a", self.a)
        object.__setattr__(self, "frame", FrameParams(a, 0.5 * (w - a * a / (w * w))))

    @property
    def centroid_offset(self) -> float:
        """Mean of psi^2 in the comoving frame"""
        return -self.frame.a / self.omega ** 2

    def _slope(self, q):
        return self.omega * _arr(q) + self.frame.a / self.omega

    def psi(self, q):
        q = _arr(q)
        return as_output(q, np.exp(-0.5 * self.omega * q * q - self.frame.a * q / self.omega))

    def psi_d1(self, q):
        return as_output(q, -self._slope(q) * self.psi(_arr(q)))

    def psi_d2(self, q):
        return as_output(q, (self._slope(q) ** 2 - self.omega) * self.psi(_arr(q)))

    def g(self, q):
        q = _arr(q)
        return as_output(q, self.omega * q * self.psi(q) ** 2)

    def g_d1(self, q):
        q = _arr(q)
        p = self.psi(q)
        return as_output(q, self.omega * p * p * (1.0 - 2.0 * q * self._slope(q)))

    def v_imag(self, q):
        q = _arr(q)
        return as_output(q, -self.omega ** 2 * q * q - self.frame.a * q + 0.5 * self.omega)

    def phase_closed_form(self, q):
        q = _arr(q)
        return as_output(q, 0.5 * self.omega * q * q)

    def params(self):
        return {"omega": self.omega, "a": self.frame.a, "mu": self.frame.mu}

    def closed_forms(self):
        return {"psi": "exp(-(omega/2) q^2 - (a/omega) q)", "G": "omega q psi^2", "V_R": "0",
                "V_I": "-omega^2 q^2 - a q + omega/2", "mu": "(omega - a^2/omega^2) / 2"}

    def notes(self):
        return {"centroid_offset": self.centroid_offset}


@dataclass(frozen=True)
class DarkSoliton(SolutionFamily):
    """Accelerating dark soliton psi = tanh(sigma q) in V_R = -a q with G = sqrt(2) sigma psi^3"""
    sigma: float
    a: float
    frame: FrameParams = field(init=False, repr=False)

    TAG = "DarkSoliton"

    def __post_init__(self):
        s = _require_finite("sigma", self.sigma)
        if s == 0.0:
            raise ValidationError("sigma must be non-zero", invariant="sigma != 0")
        object.__setattr__(self, "frame", FrameParams(self.a, DARK_SOLITON_MU_SIGN * s * s))

    def _sech2(self, q):
        return 1.0 / np.cosh(self.sigma * _arr(q)) ** 2

    def psi(self, q):
        return as_output(q, np.tanh(self.sigma * _arr(q)))

    def psi_d1(self, q):
        return as_output(q, self.sigma * self._sech2(q))

    def psi_d2(self, q):
        q = _arr(q)
        return as_output(q, -2.0 * self.sigma ** 2 * np.tanh(self.sigma * q) * self._sech2(q))

    def g(self, q):
        return as_output(q, SQRT2 * self.sigma * np.tanh(self.sigma * _arr(q)) ** 3)

    def g_d1(self, q):
        q = _arr(q)
        return as_output(q, 3.0 * SQRT2 * self.sigma ** 2 * np.tanh(self.sigma * q) ** 2 * self._sech2(q))

    def v_real(self, q):
        return as_output(q, -self.frame.a * _arr(q))

    def v_real_d1(self, q):
        return as_output(q, np.full_like(_arr(q), -self.frame.a))

    def v_imag(self, q):
        return as_output(q, 3.0 / SQRT2 * self.sigma ** 2 * self._sech2(q))

    def phase_closed_form(self, q):
        s = self.sigma * _arr(q)
        # log cosh without overflow
        return as_output(q, SQRT2 * (np.logaddexp(s, -s) - math.log(2.0)))

    def params(self):
        return {"sigma": self.sigma, "a": self.frame.a, "mu": self.frame.mu}

    def closed_forms(self):
        return {"psi": "tanh(sigma q)", "G": "sqrt(2) sigma psi^3", "V_R": "-a q",
                "V_I": "(3/sqrt(2)) sigma^2 sech^2(sigma q)", "mu": "sigma^2"}

    def notes(self):
        s2 = self.sigma ** 2
        return {
            "mu_candidates": {"selected": DARK_SOLITON_MU_SIGN * s2, "rejected": DARK_SOLITON_MU_SIGN_REJECTED * s2},
            "mu_rule": "mu zeroes the G^2 residual for psi = tanh(sigma q); the -sigma^2 candidate leaves "
                       "a residual -4 sigma^2 psi^4",
            "v_imag_sign_note": "V_I = (3/sqrt(2)) sigma^2 sech^2 is non-negative for either sign of sigma; "
                                "a sign change with sigma is not realised",
        }


@dataclass(frozen=True)
class Synthesized(SolutionFamily):
    """User envelope and real potential; G and V_I come from synthesize()"""
    envelope_profile: EnvelopeProfile
    v_real_profile: RealProfile
    frame: FrameParams
    domain: Tuple[float, float] = (-20.0, 20.0)
    right_sign: float = 1.0
    synthesis: SynthesisResult = field(init=False, repr=False, compare=False)

    TAG = "Synthesized"

    def __post_init__(self):
        object.__setattr__(self, "synthesis", synthesize(self.envelope_profile, self.v_real_profile, self.frame,
                                                         domain=self.domain, right_sign=self.right_sign))

    def psi(self, q):
        return as_output(q, self.envelope_profile.value(_arr(q)))

    def psi_d1(self, q):
        return as_output(q, self.envelope_profile.d1(_arr(q)))

    def psi_d2(self, q):
        return as_output(q, self.envelope_profile.d2(_arr(q)))

    def g(self, q):
        return self.synthesis.g_values(q, strict=True)

    def g_d1(self, q):
        return as_output(q, self.synthesis.g_derivative(q))

    def v_real(self, q):
        return as_output(q, self.v_real_profile(_arr(q)))

    def v_imag(self, q):
        return self.synthesis.v_imag(q, strict=True)

    def envelope(self):
        return self.envelope_profile

    @property
    def right_branch_sign(self):
        return self.synthesis.right_sign

    @property
    def validity_interval(self):
        return self.domain

    def branch_rule(self):
        return self.synthesis.branch_rule()

    def params(self):
        return {"a": self.frame.a, "mu": self.frame.mu, "domain": list(self.domain),
                "derivative_scheme": self.envelope_profile.derivative_scheme}

    def closed_forms(self):
        return {"G": "smooth-branch sqrt(psi^3 (psi'' + 2 (mu - a q - V_R) psi))", "V_I": "G' / (2 psi^2)"}


# ----------------------------------------------------------------------------------------
# Family-independent entry points


def psi(family: SolutionFamily, q):
    """Real envelope in the accelerating frame"""
    return family.psi(q)


def g_aux(family: SolutionFamily, q):
    """Signed auxiliary function G(q)"""
    return family.g(q)


def v_real(family: SolutionFamily, q):
    """Real part of the comoving potential"""
    return family.v_real(q)


def v_imag(family: SolutionFamily, q):
    """Imaginary (gain/loss) part of the comoving potential"""
    return family.v_imag(q)


FAMILY_PARAMS = {
    "AiryFree": ("a", "mu"),
    "ConstIntensityInvHarm": ("V0", "a", "mu"),
    "ConstIntensityPowerLaw": ("V0", "n", "a"),
    "GaussianLocalized": ("omega", "a"),
    "DarkSoliton": ("sigma", "a"),
}


def family_from_mapping(tag: str, params: Dict[str, Any]) -> SolutionFamily:
    """
    Construct a built-in family from a tag and a parameter mapping

    Args:
        tag: family tag
        params: named parameters (unknown names are rejected)

    Returns:
        SolutionFamily instance
    """
    classes = {cls.TAG: cls for cls in (AiryFree, ConstIntensityInvHarm, ConstIntensityPowerLaw,
                                        GaussianLocalized, DarkSoliton)}
    if tag not in classes:
        raise ValidationError(f"unknown family tag {tag!r}; expected one of {sorted(classes)}",
                              invariant="tag is a built-in family")
    allowed = FAMILY_PARAMS[tag]
    unknown = set(params) - set(allowed)
    if unknown:
        raise ValidationError(f"{tag} does not take parameter(s) {sorted(unknown)}; allowed: {list(allowed)}",
                              invariant="known family parameters")
    missing = [name for name in allowed if name not in params and not (tag == "AiryFree" and name == "mu")]
    if missing:
        raise ValidationError(f"{tag} is missing parameter(s) {missing}", invariant="complete family parameters")
    return classes[tag](**params)


def validity_interval(family: SolutionFamily) -> Tuple[float, float]:
    """q-interval on which the family's closed forms (or synthesis domain) are defined"""
    return family.validity_interval
