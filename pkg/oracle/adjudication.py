"""
Numerical adjudication between two candidate values of a constant.

Each candidate builds an exact-solution sampler; the candidate whose PDE
residual converges to zero at the scheme order on a refinement ladder wins.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from core.errors import Inconclusive
from oracle.residuals import ResidualReport, pde_residual_ladder
from propagation.potential import ComovingPotential, NonlinearTerm
from solutions.constants import (
    DARK_SOLITON_MU_SIGN, DARK_SOLITON_MU_SIGN_REJECTED,
    NONLINEAR_SHIFT_CANDIDATES, NONLINEAR_SHIFT_COEFFICIENT
)
from solutions.families import ConstIntensityInvHarm, DarkSoliton
from solutions.lab_frame import lab_wave, nonlinear_mu_shift

logger = logging.getLogger(__name__)

DEFAULT_STEPS = (0.004, 0.002, 0.001)
CONVERGED_RESIDUAL = 1e-4
ORDER_TOLERANCE = 0.5


@dataclass(frozen=True)
class Claim:
    """Two candidate values for one constant plus everything needed to test them"""
    parameter: str
    candidates: Tuple[float, float]
    wave_builder: Callable[[float], Callable]
    potential: ComovingPotential
    window: Tuple[float, float]
    t: float
    nonlinear: Optional[NonlinearTerm] = None
    steps: Sequence[float] = DEFAULT_STEPS
    order: int = 2
    frozen: Optional[float] = None
    labels: Dict[str, str] = field(default_factory=dict)

    def swapped(self) -> "Claim":
        return Claim(self.parameter, (self.candidates[1], self.candidates[0]), self.wave_builder, self.potential,
                     self.window, self.t, self.nonlinear, self.steps, self.order, self.frozen, self.labels)


@dataclass
class DecisionRecord:
    parameter: str
    candidates: Tuple[float, float]
    ladders: Dict[float, List[ResidualReport]]
    converged: Dict[float, bool]
    scheme_order: int
    selected: Optional[float] = None
    frozen: Optional[float] = None
    labels: Dict[str, str] = field(default_factory=dict)

    @property
    def agrees_with_frozen(self) -> Optional[bool]:
        if self.frozen is None or self.selected is None:
            return None
        return self.selected == self.frozen

    def orders(self) -> Dict[float, Optional[float]]:
        return {value: ladder[-1].convergence_order for value, ladder in self.ladders.items()}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "parameter": self.parameter,
            "candidates": list(self.candidates),
            "selected": self.selected,
            "frozen": self.frozen,
            "agrees_with_frozen": self.agrees_with_frozen,
            "scheme_order": self.scheme_order,
            "labels": self.labels,
            "ladders": [
                {
                    "value": value,
                    "converged": self.converged[value],
                    "convergence_order": ladder[-1].convergence_order,
                    "levels": [report.to_dict() for report in ladder],
                }
                for value, ladder in self.ladders.items()
            ],
        }


def converges(ladder: List[ResidualReport], scheme_order: int) -> bool:
    """Final residual below 1e-4 and estimated order within 0.5 of the scheme order"""
    rate = ladder[-1].convergence_order
    return ladder[-1].l_inf < CONVERGED_RESIDUAL and rate is not None and abs(rate - scheme_order) <= ORDER_TOLERANCE


def adjudicate(claim: Claim, max_workers: int = 1) -> DecisionRecord:
    """
    Select the candidate whose residual ladder converges to zero

    Args:
        claim: candidates, wave builder, potential and ladder
        max_workers: candidates evaluated concurrently when > 1

    Returns:
        DecisionRecord (independent of candidate order)

    Raises:
        Inconclusive: both or neither candidate converge; the record is attached
    """
    a, b = claim.candidates
    values = [a] if a == b else [a, b]

    def run(value: float) -> List[ResidualReport]:
        logger.info(f"Adjudicating {claim.parameter} = {value:g} on steps {list(claim.steps)}")
        return pde_residual_ladder(claim.wave_builder(value), claim.potential, claim.nonlinear,
                                   claim.window, claim.t, claim.steps, order=claim.order)

    if max_workers > 1 and len(values) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            ladders = list(pool.map(run, values))
    else:
        ladders = [run(value) for value in values]

    record = DecisionRecord(
        parameter=claim.parameter,
        candidates=(a, b),
        ladders=dict(zip(values, ladders)),
        converged={value: converges(ladder, claim.order) for value, ladder in zip(values, ladders)},
        scheme_order=claim.order,
        frozen=claim.frozen,
        labels=dict(claim.labels),
    )
    for value, ladder in record.ladders.items():
        logger.info(f"{claim.parameter} = {value:g}: final residual {ladder[-1].l_inf:.3e}, "
                    f"order {ladder[-1].convergence_order}, converged={record.converged[value]}")

    winners = [value for value in values if record.converged[value]]
    if len(winners) != 1:
        reason = "both candidates converge" if winners else "neither candidate converges"
        logger.error(f"Adjudication of {claim.parameter} inconclusive: {reason}")
        raise Inconclusive(f"{claim.parameter}: {reason}", record=record.to_dict())

    record.selected = winners[0]
    if record.agrees_with_frozen is False:
        logger.warning(f"{claim.parameter}: selected {record.selected:g} differs from frozen {record.frozen:g}")
    else:
        logger.info(f"{claim.parameter}: selected {record.selected:g}")
    return record


def dark_soliton_claim(sigma: float = 1.0, a: float = 1.0, t: float = 0.7, half_width: float = 3.0,
                       steps: Sequence[float] = DEFAULT_STEPS) -> Claim:
    """mu = +sigma^2 against mu = -sigma^2 for psi = tanh(sigma q)"""
    family = DarkSoliton(sigma, a)
    centre = family.frame.x_c(t)
    s2 = sigma * sigma
    return Claim(
        parameter="dark_soliton_mu",
        candidates=(DARK_SOLITON_MU_SIGN * s2, DARK_SOLITON_MU_SIGN_REJECTED * s2),
        wave_builder=lambda mu: lab_wave(family, s_mu=mu),
        potential=ComovingPotential.from_family(family),
        window=(centre - half_width, centre + half_width),
        t=t,
        steps=tuple(steps),
        frozen=family.frame.mu,
        labels={"sigma": f"{sigma:g}", "a": f"{a:g}"},
    )


def nonlinear_shift_claim(mu: float = 0.25, V0: float = 1.0, a: float = 1.0, sigma_nl: float = 0.1,
                          p: float = 2.0, t: float = 0.5, window: Tuple[float, float] = (-1.0, 2.0),
                          steps: Sequence[float] = DEFAULT_STEPS) -> Claim:
    """c_shift in mu -> mu + c_shift sigma_nl for a constant-intensity wave under sigma_nl |Psi|^p"""
    family = ConstIntensityInvHarm(V0, a, mu)
    nonlinear = NonlinearTerm(sigma_nl, p)
    return Claim(
        parameter="c_shift",
        candidates=tuple(NONLINEAR_SHIFT_CANDIDATES),
        wave_builder=lambda c: lab_wave(family, s_mu=nonlinear_mu_shift(mu, sigma_nl, p, c_shift=c)),
        potential=ComovingPotential.from_family(family),
        window=window,
        t=t,
        nonlinear=nonlinear,
        steps=tuple(steps),
        frozen=NONLINEAR_SHIFT_COEFFICIENT,
        labels={"mu": f"{mu:g}", "sigma_nl": f"{sigma_nl:g}", "p": f"{p:g}"},
    )


def shipped_claims() -> List[Claim]:
    return [dark_soliton_claim(), nonlinear_shift_claim()]
