"""
Synthesis of (G, V_I) from an arbitrary envelope.

For a real envelope psi, a real potential V_R and frame (a, mu):

    G^2 = psi^3 (psi'' + 2 (mu - a q - V_R) psi)
    V_I = G' / (2 psi^2)

With G = psi^2 H the first relation becomes

    H^2 = K = psi''/psi + 2 (mu - a q - V_R)

K carries no power of psi, so it keeps its size in the tails of a localized
envelope and at the nodes of a dark one. H is the signed square root of K
that stays continuously differentiable: the sign flips at zeros of K whose
square root has odd order (the double zero of a linear H) and is kept at
zeros of even root order. Then

    G'  = 2 psi psi' H + psi^2 H'
    V_I = H'/2 + H psi'/psi

The sign of G on the right end of the scanned domain is a parameter.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from core.errors import DivisionNearZero, InvalidRegion
from solutions.constants import PSI_FLOOR
from solutions.frame import FrameParams
from solutions.profiles import AuxiliaryG, EnvelopeProfile, RealProfile, as_output, centred_first_4th

logger = logging.getLogger(__name__)

# K at q0 +- near over K at q0 +- far: 1e-2 for a double zero, about 1 for a positive minimum
ZERO_RATIO = 0.05
NEAR_OVER_FAR = 0.1
# centred step for K', as a fraction of the scan spacing
SLOPE_STEP_FRACTION = 1e-2


def radicand(psi: EnvelopeProfile, v_real: RealProfile, frame: FrameParams, q):
    """Right-hand side of the G^2 equation"""
    q = np.asarray(q, dtype=float)
    p = psi.value(q)
    return p ** 3 * (psi.d2(q) + 2.0 * (frame.mu - frame.a * q - v_real(q)) * p)


def reduced_radicand(psi: EnvelopeProfile, v_real: RealProfile, frame: FrameParams, q):
    """K = G^2 / psi^4; NaN where psi vanishes"""
    q = np.asarray(q, dtype=float)
    p = np.asarray(psi.value(q), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.asarray(psi.d2(q), dtype=float) / p
    k = k + 2.0 * (frame.mu - frame.a * q - np.asarray(v_real(q), dtype=float))
    return np.where(np.isfinite(k), k, np.nan)


def _root_order(k, q_zero: float, far: float) -> Optional[int]:
    """Order m of the zero of H at a minimum of K = H^2, or None when K does not vanish there"""
    near = NEAR_OVER_FAR * far
    inner = np.array([k(q_zero - near), k(q_zero + near)], dtype=float)
    outer = np.array([k(q_zero - far), k(q_zero + far)], dtype=float)
    further = np.array([k(q_zero - 2.0 * far), k(q_zero + 2.0 * far)], dtype=float)
    if not (np.all(np.isfinite(inner)) and np.all(outer > 0.0) and np.all(further > 0.0)):
        return None
    if np.max(np.abs(inner)) > ZERO_RATIO * np.min(outer):
        return None
    # K ~ (q - q0)^(2m)
    return int(round(0.5 * float(np.mean(np.log2(further / outer)))))


@dataclass(frozen=True)
class SynthesisResult:
    """G and V_I profiles produced by synthesize()"""
    psi: EnvelopeProfile
    v_real: RealProfile
    frame: FrameParams
    domain: Tuple[float, float]
    flip_points: Tuple[float, ...]
    right_sign: float
    g_step: float
    psi_floor: float
    radicand_tol: float

    def radicand(self, q):
        return radicand(self.psi, self.v_real, self.frame, q)

    def reduced(self, q):
        return reduced_radicand(self.psi, self.v_real, self.frame, q)

    def valid(self, q):
        """Validity mask: True where the radicand is non-negative (within tolerance)"""
        return np.asarray(self.radicand(q)) >= -self.radicand_tol

    def branch_sign(self, q):
        q = np.asarray(q, dtype=float)
        flips = np.asarray(self.flip_points, dtype=float)
        if flips.size == 0:
            return np.full_like(q, self.right_sign)
        to_the_right = flips.size - np.searchsorted(flips, q, side="right")
        return self.right_sign * np.where(to_the_right % 2 == 0, 1.0, -1.0)

    def g_values(self, q, strict: bool = True):
        """Signed smooth-branch G; NaN (or InvalidRegion when strict) where the radicand is negative"""
        qa = np.asarray(q, dtype=float)
        rad = np.asarray(self.radicand(qa), dtype=float)
        negative = rad < -self.radicand_tol
        if strict and np.any(negative):
            bad = np.atleast_1d(qa)[np.atleast_1d(negative)]
            raise InvalidRegion(f"G^2 right-hand side is negative at {bad.size} point(s), first q={bad[0]:.6g}",
                                first_q=float(bad[0]))
        g = self.branch_sign(qa) * np.sqrt(np.clip(rad, 0.0, None))
        g = np.where(negative, np.nan, g)
        return as_output(q, g)

    def h_values(self, q):
        """H = G / psi^2 on the smooth branch"""
        qa = np.asarray(q, dtype=float)
        return self.branch_sign(qa) * np.sqrt(np.clip(self.reduced(qa), 0.0, None))

    def h_derivative(self, q):
        return centred_first_4th(self.h_values, self.g_step)(q)

    def g_derivative(self, q):
        qa = np.asarray(q, dtype=float)
        p = np.asarray(self.psi.value(qa), dtype=float)
        dp = np.asarray(self.psi.d1(qa), dtype=float)
        dg = 2.0 * p * dp * self.h_values(qa) + p * p * self.h_derivative(qa)
        missing = ~np.isfinite(dg)
        if np.any(missing):
            # stencil touched a node of psi; difference G itself there
            direct = centred_first_4th(lambda s: self.g_values(s, strict=False), self.g_step)(qa)
            dg = np.where(missing, direct, dg)
        return as_output(q, dg)

    def v_imag(self, q, strict: bool = True):
        """V_I = H'/2 + H psi'/psi; flags |psi| below the floor instead of dividing"""
        qa = np.asarray(q, dtype=float)
        p = np.asarray(self.psi.value(qa), dtype=float)
        small = np.abs(p) < self.psi_floor
        if strict and np.any(small):
            bad = np.atleast_1d(qa)[np.atleast_1d(small)]
            raise DivisionNearZero(f"|psi| < {self.psi_floor:g} at {bad.size} point(s), first q={bad[0]:.6g}",
                                   first_q=float(bad[0]))
        if strict:
            self.g_values(qa, strict=True)
        dp = np.asarray(self.psi.d1(qa), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            vi = 0.5 * self.h_derivative(qa) + self.h_values(qa) * dp / p
        vi = np.where(small, np.nan, vi)
        return as_output(q, vi)

    @property
    def g(self) -> AuxiliaryG:
        return AuxiliaryG(value=lambda s: self.g_values(s, strict=False),
                          derivative=self.g_derivative,
                          branch_rule=self.branch_rule())

    def branch_rule(self) -> Dict[str, Any]:
        return {
            "kind": "smooth-signed-root",
            "right_sign": self.right_sign,
            "flip_points": list(self.flip_points),
            "domain": list(self.domain),
        }

    def __iter__(self):
        # unpacks as (G, V_I)
        yield self.g
        yield self.v_imag


def synthesize(psi: EnvelopeProfile, v_real: RealProfile, frame: FrameParams,
               domain: Tuple[float, float] = (-20.0, 20.0), n_scan: int = 4001,
               right_sign: float = 1.0, g_step: float = 1e-3,
               psi_floor: float = PSI_FLOOR) -> SynthesisResult:
    """
    Build the smooth-branch G and V_I for an envelope and real potential

    Args:
        psi: envelope with derivatives
        v_real: real potential profile V_R(q)
        frame: frame parameters (a, mu)
        domain: query domain scanned for zeros of K
        n_scan: scan resolution
        right_sign: sign of G at the right end of the domain
        g_step: step of the fourth-order difference used for H'
        psi_floor: |psi| below which V_I is flagged instead of computed

    Returns:
        SynthesisResult (unpacks as (G, V_I))
    """
    lo, hi = float(domain[0]), float(domain[1])
    qs = np.linspace(lo, hi, n_scan)
    step = qs[1] - qs[0]
    rad = radicand(psi, v_real, frame, qs)
    scale = max(float(np.max(np.abs(rad))), np.finfo(float).tiny)
    tol = 1e-12 * max(scale, 1.0)

    def k_at(s):
        return reduced_radicand(psi, v_real, frame, s)

    k_scan = k_at(qs)
    finite = np.isfinite(k_scan)
    k_tol = 1e-12 * max(float(np.max(np.abs(k_scan[finite]))) if np.any(finite) else 0.0, 1.0)
    if not np.any(k_scan[finite] >= -k_tol):
        raise InvalidRegion(f"G^2 right-hand side is negative over the whole domain [{lo:g}, {hi:g}]",
                            domain=[lo, hi])

    h = SLOPE_STEP_FRACTION * step

    def slope(s):
        s = np.asarray(s, dtype=float)
        return (k_at(s + h) - k_at(s - h)) / (2.0 * h)

    slopes = slope(qs)
    flips = []
    for i in range(n_scan - 1):
        s0, s1 = slopes[i], slopes[i + 1]
        # minima of K sit where K' turns from negative to non-negative
        if not (np.isfinite(s0) and np.isfinite(s1) and s0 < 0.0 <= s1):
            continue
        if s1 == 0.0:
            q_zero = float(qs[i + 1])
        else:
            q_zero = brentq(lambda s: float(slope(s)), qs[i], qs[i + 1], xtol=1e-14)
        order = _root_order(k_at, q_zero, step)
        if order is None:
            continue
        flip = order % 2 == 1
        if flip and not (flips and q_zero - flips[-1] < step):
            flips.append(float(q_zero))
        logger.debug(f"Zero of K at q={q_zero:.12g}, root order {order}, flip={flip}")

    negative_fraction = float(np.mean(rad < -tol))
    if negative_fraction > 0:
        logger.warning(f"Radicand negative on {100 * negative_fraction:.1f}% of [{lo:g}, {hi:g}]; "
                       f"those points are masked")

    return SynthesisResult(psi=psi, v_real=v_real, frame=frame, domain=(lo, hi),
                           flip_points=tuple(flips), right_sign=float(np.sign(right_sign) or 1.0),
                           g_step=g_step, psi_floor=psi_floor, radicand_tol=tol)
