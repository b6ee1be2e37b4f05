"""JSON-ready description of a solution family."""

from typing import Any, Dict

import numpy as np

from diagnostics.measures import gain_loss_summary
from propagation.potential import ComovingPotential, pt_symmetric
from solutions.constants import NONLINEAR_SHIFT_CANDIDATES, NONLINEAR_SHIFT_COEFFICIENT
from solutions.families import ConstIntensityInvHarm, ConstIntensityPowerLaw, SolutionFamily

PT_SAMPLE_TIMES = (0.0, 0.5, 1.0)


def describe(family: SolutionFamily, half_width: float = 10.0, n_samples: int = 2001) -> Dict[str, Any]:
    """
    Closed forms, derived constants and gain/loss character of a family

    Args:
        family: solution family
        half_width: half-width of the q-interval used for sampled properties
        n_samples: sample count on that interval

    Returns:
        Dictionary ready for save_json_file
    """
    lo, hi = family.validity_interval
    q = np.linspace(max(lo, -half_width), min(hi, half_width), n_samples)
    v_imag = np.asarray(family.v_imag(q), dtype=float)

    doc: Dict[str, Any] = {
        "family": family.TAG,
        "params": family.params(),
        "frame": family.frame.to_dict(),
        "closed_forms": family.closed_forms(),
        "branch": family.branch_rule(),
        "right_branch_sign": family.right_branch_sign,
        "validity_interval": [lo, hi],
        "pt_symmetric": pt_symmetric(ComovingPotential.from_family(family), q, PT_SAMPLE_TIMES),
        "gain_loss": {**gain_loss_summary(v_imag, q[1] - q[0]), "sampled_on": [float(q[0]), float(q[-1])]},
        "notes": family.notes(),
    }
    if isinstance(family, (ConstIntensityInvHarm, ConstIntensityPowerLaw)):
        doc["nonlinear_shift"] = {
            "c_shift": NONLINEAR_SHIFT_COEFFICIENT,
            "candidates": list(NONLINEAR_SHIFT_CANDIDATES),
            "rule": "mu -> mu + c_shift * sigma_nl for V_R -> V_R + sigma_nl |Psi|^p",
        }
    return doc
