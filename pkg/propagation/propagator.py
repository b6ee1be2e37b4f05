"""
Time-stepping driver: iterates a scheme, applies the absorber and records
snapshots and scalar diagnostics.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from core.errors import AccelwaveError, NormFloor, ValidationError
from diagnostics.measures import NORM_FLOOR, centroid, norm, peak_position
from propagation.crank_nicolson import step_crank_nicolson
from propagation.grid import ComplexWaveField
from propagation.potential import Absorber, ComovingPotential, NonlinearTerm
from propagation.split_step import GAIN_CEILING, step_splitstep

logger = logging.getLogger(__name__)

SCHEMES = ("split-step", "crank-nicolson")
STABILITY_LIMIT = 0.5


@dataclass(frozen=True)
class PropagatorConfig:
    """
    Time-stepping settings

    Args:
        dt: time step
        n_steps: number of steps
        scheme: split-step or crank-nicolson
        absorber: optional edge absorber
        record_stride: record every this many steps
        store_fields: keep the full field at each record
        workers: scipy.fft worker count (split-step only)
        ceiling: gain ceiling on max|Psi|
    """
    dt: float
    n_steps: int
    scheme: str = "split-step"
    absorber: Optional[Absorber] = None
    record_stride: int = 1
    store_fields: bool = True
    workers: int = 1
    ceiling: float = GAIN_CEILING

    def __post_init__(self):
        if not self.dt > 0:
            raise ValidationError(f"dt must be > 0, got {self.dt}", invariant="dt > 0")
        if self.n_steps < 0:
            raise ValidationError(f"n_steps must be >= 0, got {self.n_steps}", invariant="n_steps >= 0")
        if self.scheme not in SCHEMES:
            raise ValidationError(f"unknown scheme {self.scheme!r}, expected one of {SCHEMES}",
                                  invariant="scheme in {split-step, crank-nicolson}")
        if self.record_stride < 1:
            raise ValidationError(f"record_stride must be >= 1, got {self.record_stride}",
                                  invariant="record_stride >= 1")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dt": self.dt,
            "n_steps": self.n_steps,
            "scheme": self.scheme,
            "absorber": self.absorber.to_dict() if self.absorber else None,
            "record_stride": self.record_stride,
            "workers": self.workers,
        }


@dataclass
class PropagationRecord:
    """Snapshots and per-record diagnostics of one run"""
    config: PropagatorConfig
    times: List[float] = field(default_factory=list)
    fields: List[ComplexWaveField] = field(default_factory=list)
    norms: List[float] = field(default_factory=list)
    centroids: List[float] = field(default_factory=list)
    peaks: List[float] = field(default_factory=list)
    max_abs: List[float] = field(default_factory=list)
    steps_completed: int = 0
    stability_warning: bool = False
    error: Optional[Dict[str, Any]] = None
    elapsed: float = 0.0

    def add(self, snapshot: ComplexWaveField) -> None:
        self.times.append(float(snapshot.t))
        if self.config.store_fields:
            self.fields.append(snapshot.copy())
        n = norm(snapshot)
        self.norms.append(n)
        try:
            self.centroids.append(centroid(snapshot))
        except NormFloor:
            self.centroids.append(float("nan"))
        self.peaks.append(peak_position(snapshot).position if n > 0.0 else float("nan"))
        self.max_abs.append(snapshot.max_abs)

    @property
    def final(self) -> Optional[ComplexWaveField]:
        return self.fields[-1] if self.fields else None

    def field_at(self, t: float) -> ComplexWaveField:
        """Stored snapshot closest to t"""
        if not self.fields:
            raise ValidationError("record holds no stored fields", invariant="store_fields")
        idx = int(np.argmin(np.abs(np.asarray(self.times) - t)))
        return self.fields[idx]

    def rows(self) -> List[Dict[str, float]]:
        return [
            {"t": t, "norm": n, "centroid": c, "peak": p, "max_abs": m}
            for t, n, c, p, m in zip(self.times, self.norms, self.centroids, self.peaks, self.max_abs)
        ]

    def summary(self) -> Dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "records": len(self.times),
            "steps_completed": self.steps_completed,
            "t_final": self.times[-1] if self.times else None,
            "stability_warning": self.stability_warning,
            "elapsed_s": self.elapsed,
            "error": self.error,
        }


def propagate(initial: ComplexWaveField, potential: ComovingPotential, nonlinear: Optional[NonlinearTerm],
              config: PropagatorConfig) -> PropagationRecord:
    """
    Evolve a field for config.n_steps steps

    On a step error the record (valid up to the failing step) is attached to the
    raised exception as `record` and its error entry is filled in.

    Args:
        initial: field at the start time initial.t
        potential: comoving potential
        nonlinear: optional nonlinear term
        config: propagator settings

    Returns:
        PropagationRecord
    """
    record = PropagationRecord(config=config)
    grid = initial.grid
    t0 = float(initial.t)
    damping = config.absorber.damping(grid, config.dt) if config.absorber else None

    logger.info(f"Propagating {config.n_steps} {config.scheme} steps, dt={config.dt:g}, n={grid.n}, "
                f"t0={t0:g}, absorber={'on' if damping is not None else 'off'}")
    started = time.perf_counter()

    current = initial.copy()
    record.add(current)

    step = 0
    try:
        for step in range(1, config.n_steps + 1):
            t = t0 + (step - 1) * config.dt
            if (step - 1) % config.record_stride == 0:
                _stability_check(record, potential, grid, t, config.dt)
            if config.scheme == "split-step":
                current = step_splitstep(current, potential, nonlinear, t, config.dt,
                                         workers=config.workers, ceiling=config.ceiling)
            else:
                current = step_crank_nicolson(current, potential, nonlinear, t, config.dt, ceiling=config.ceiling)
            # time from the step count rather than accumulated dt
            current.t = t0 + step * config.dt
            if damping is not None:
                current.amplitudes *= damping
            current.check_finite(step=step)
            record.steps_completed = step
            if step % config.record_stride == 0 or step == config.n_steps:
                record.add(current)
    except AccelwaveError as exc:
        record.error = {**exc.to_dict(), "step": step}
        record.elapsed = time.perf_counter() - started
        logger.error(f"Propagation stopped at step {step}: {exc}")
        exc.record = record
        raise

    record.elapsed = time.perf_counter() - started
    logger.info(f"Propagation finished: {record.steps_completed} steps, {len(record.times)} records, "
                f"{record.elapsed:.2f}s")
    return record


def _stability_check(record: PropagationRecord, potential: ComovingPotential, grid, t: float, dt: float) -> None:
    if record.stability_warning:
        return
    gain = potential.max_gain(grid.x, t)
    if dt * gain >= STABILITY_LIMIT:
        record.stability_warning = True
        logger.warning(f"dt*max|V_I| = {dt * gain:.3g} >= {STABILITY_LIMIT} at t={t:.4g}; "
                       f"the gain step may be inaccurate")
