"""Error norms of numerical fields against exact solutions or against each other."""

from typing import Any, Dict, Optional, Tuple

import numpy as np

from core.errors import ValidationError
from solutions.lab_frame import assemble_lab_frame


def _masked(field, window: Optional[Tuple[float, float]]):
    if window is None:
        return np.ones(field.grid.n, dtype=bool)
    mask = field.grid.window_mask(*window)
    if not mask.any():
        raise ValidationError(f"comparison window {window} contains no grid points", invariant="window within grid")
    return mask


def compare_fields(field, reference, phase_aligned: bool = False,
                   window: Optional[Tuple[float, float]] = None) -> Dict[str, Any]:
    """
    L2 / L_inf distance between two fields on one grid

    With phase_aligned the single global phase maximising the overlap
    sum(conj(reference) field) is removed first and reported.
    """
    if field.grid != reference.grid:
        raise ValidationError("fields live on different grids", invariant="same grid")
    mask = _masked(field, window)
    a = field.amplitudes[mask]
    b = reference.amplitudes[mask]

    phase = 0.0
    if phase_aligned:
        overlap = np.vdot(b, a)
        phase = float(np.angle(overlap)) if abs(overlap) > 0.0 else 0.0
        a = a * np.exp(-1j * phase)

    diff = a - b
    return {
        "l2": float(np.sqrt(np.sum(np.abs(diff) ** 2) * field.grid.dx)),
        "l_inf": float(np.max(np.abs(diff))) if diff.size else 0.0,
        "phase_aligned": phase_aligned,
        "phase": phase,
    }


def compare_to_analytic(field, family, t: Optional[float] = None, phase_aligned: bool = False,
                        window: Optional[Tuple[float, float]] = None, s_mu: Optional[float] = None) -> Dict[str, Any]:
    """
    Error norms against assemble_lab_frame(family, grid, t)

    Args:
        field: numerical field
        family: solution family
        t: time (defaults to field.t)
        phase_aligned: remove and report one global phase
        window: optional (lo, hi) comparison window
        s_mu: frame constant for S(t), as in assemble_lab_frame

    Returns:
        {l2, l_inf, phase_aligned, phase}
    """
    t = field.t if t is None else t
    reference = assemble_lab_frame(family, field.grid, t, s_mu=s_mu)
    return compare_fields(field, reference, phase_aligned=phase_aligned, window=window)


def shape_error(field, family, t: Optional[float] = None,
                window: Optional[Tuple[float, float]] = None) -> float:
    """max | |Psi|^2 - psi^2(x - a t^2 / 2) | over the grid or window"""
    t = field.t if t is None else t
    mask = _masked(field, window)
    q = field.grid.x[mask] - family.frame.x_c(t)
    expected = np.asarray(family.psi(q), dtype=float) ** 2
    return float(np.max(np.abs(field.density[mask] - expected)))
