"""
Scenario execution: build -> propagate -> diagnose -> emit.

A run always ends with a manifest; errors are recorded there and whatever was
computed before the failure is still written.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.interpolate import make_interp_spline

from core.errors import AccelwaveError, Inconclusive, IOFailure, ValidationError
from core.utils import format_duration
from diagnostics.comparison import compare_fields, compare_to_analytic, shape_error
from diagnostics.measures import gain_loss_summary, intensity_flatness, peak_position, source_position
from diagnostics.trajectory import Trajectory, ehrenfest_residual, fit_parabola
from experiments.output import (
    emit_density_pgm, ensure_dir, write_fields, write_manifest, write_profiles, write_rows
)
from experiments.scenario import ScenarioSpec
from oracle.adjudication import adjudicate, dark_soliton_claim, nonlinear_shift_claim
from oracle.residuals import ode_residual_G, ode_residual_VI
from propagation.potential import ComovingPotential, pt_symmetric
from propagation.propagator import PropagationRecord, propagate
from solutions.describe import describe
from solutions.families import ConstIntensityInvHarm, ConstIntensityPowerLaw, SolutionFamily
from solutions.frame import FrameParams
from solutions.lab_frame import assemble_lab_frame, nonlinear_mu_shift
from solutions.profiles import EnvelopeProfile, zero_profile
from solutions.synthesis import synthesize

CONSTANT_INTENSITY = (ConstIntensityInvHarm, ConstIntensityPowerLaw)


def regime_note(family: SolutionFamily) -> Optional[str]:
    """Manifest note for constant-intensity runs whose truncated wave is not expected to stay flat"""
    if isinstance(family, ConstIntensityInvHarm) and not family.at_threshold:
        return (f"mu = {family.frame.mu:g} is above the constant-gain value a^2/(4 V0^2) = {family.threshold:g}: "
                f"V_I varies across the window and tends to +-|V0|/sqrt(2) far out, so the window edges grow and decay "
                f"unevenly and the interior flatness and acceleration fit are descriptive only. G has no zero "
                f"here, so the tracked source is the minimum of the wavenumber mismatch.")
    return None


@dataclass
class RunResult:
    """Outcome of one scenario run (or sweep)"""
    name: str
    out_dir: Path
    status: str
    summary: Dict[str, Any] = field(default_factory=dict)
    error: Optional[Dict[str, Any]] = None
    record: Optional[PropagationRecord] = field(default=None, repr=False)
    children: List["RunResult"] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "out_dir": str(self.out_dir),
            "status": self.status,
            "summary": self.summary,
            "error": self.error,
            "children": [child.to_dict() for child in self.children],
        }


class ScenarioRunner:
    """Runs scenario specs and writes their artifacts"""

    def __init__(self, output_root: str = "runs", scheme: Optional[str] = None, resolution_scale: float = 1.0,
                 concurrent_sweep: bool = False, fft_workers: Optional[int] = None,
                 settings: Optional[Dict[str, Any]] = None):
        self.output_root = Path(output_root)
        self.scheme = scheme
        self.resolution_scale = resolution_scale
        self.concurrent_sweep = concurrent_sweep
        self.fft_workers = fft_workers
        self.settings = settings or {}
        self.logger = logging.getLogger(__name__)

    # ============================= Entry =============================

    def prepare(self, spec: ScenarioSpec) -> ScenarioSpec:
        """Apply the command-line overrides"""
        spec = spec.scaled(self.resolution_scale)
        if spec.propagator is not None:
            if self.scheme:
                spec = spec.with_value("propagator.scheme", self.scheme)
            if self.fft_workers:
                spec = spec.with_value("propagator.workers", self.fft_workers)
        return spec

    def run(self, spec: ScenarioSpec, out_dir: Optional[Path] = None) -> RunResult:
        """
        Run a scenario

        Args:
            spec: validated scenario
            out_dir: output directory (defaults to [output] dir, then <output_root>/<name>)

        Returns:
            RunResult
        """
        spec = self.prepare(spec)
        out_dir = Path(out_dir or spec.output.dir or self.output_root / spec.name)
        ensure_dir(out_dir)
        self.logger.info(f"Running scenario '{spec.name}' ({spec.kind}) into {out_dir}")

        if spec.sweep is not None:
            return self._run_sweep(spec, out_dir)
        if spec.kind == "adjudicate":
            return self._run_adjudicate(spec, out_dir)
        if spec.kind == "synthesize":
            return self._run_synthesize(spec, out_dir)
        return self._run_propagate(spec, out_dir)

    # ============================= Sweeps =============================

    def _run_sweep(self, spec: ScenarioSpec, out_dir: Path) -> RunResult:
        sweep = spec.sweep
        base = spec.without_sweep()
        key = sweep.parameter.split(".")[1]
        jobs = [(value, base.with_value(sweep.parameter, value), out_dir / f"{key}_{value:g}")
                for value in sweep.values]
        self.logger.info(f"Sweep over {sweep.parameter} = {list(sweep.values)} "
                         f"({'concurrent' if self.concurrent_sweep else 'sequential'})")

        def run_one(job):
            _, sub_spec, sub_dir = job
            ensure_dir(sub_dir)
            return self._dispatch(sub_spec, sub_dir)

        if self.concurrent_sweep and len(jobs) > 1:
            with ThreadPoolExecutor(max_workers=len(jobs)) as pool:
                children = list(pool.map(run_one, jobs))
        else:
            children = [run_one(job) for job in jobs]

        summary: Dict[str, Any] = {
            "parameter": sweep.parameter,
            "values": list(sweep.values),
            "runs": [{"value": value, "dir": str(child.out_dir.name), "status": child.status,
                      "summary": child.summary} for (value, _, _), child in zip(jobs, children)],
        }
        errors = [child.error for child in children if child.error]

        accel_errors = [child.summary.get("fit", {}).get("acc_rel_error") for child in children]
        if all(err is not None for err in accel_errors) and len(accel_errors) > 1:
            summary["acc_rel_errors"] = accel_errors
            summary["acc_error_monotonic"] = bool(np.all(np.diff(accel_errors) >= 0.0))

        if sweep.compare_final and all(child.record is not None and child.record.final is not None
                                       for child in children):
            reference = children[0].record.final
            window = children[0].summary.get("final_interior_window")
            summary["final_comparison"] = [
                {"value": value, **compare_fields(child.record.final, reference, phase_aligned=True,
                                                  window=tuple(window) if window else None)}
                for (value, _, _), child in zip(jobs[1:], children[1:])
            ]

        status = "ok" if not errors else "error"
        manifest = {"scenario": spec.model_dump(exclude_none=True), "status": status, "sweep": summary,
                    "errors": errors, "settings": self.settings}
        write_manifest(manifest, out_dir / "manifest.json")
        return RunResult(spec.name, out_dir, status, summary, errors[0] if errors else None, children=children)

    def _dispatch(self, spec: ScenarioSpec, out_dir: Path) -> RunResult:
        if spec.kind == "adjudicate":
            return self._run_adjudicate(spec, out_dir)
        if spec.kind == "synthesize":
            return self._run_synthesize(spec, out_dir)
        return self._run_propagate(spec, out_dir)

    # ============================= Propagation =============================

    def _run_propagate(self, spec: ScenarioSpec, out_dir: Path) -> RunResult:
        started = time.perf_counter()
        errors: List[Dict[str, Any]] = []
        artifacts: List[str] = []
        record: Optional[PropagationRecord] = None
        summary: Dict[str, Any] = {}
        manifest: Dict[str, Any] = {"scenario": spec.model_dump(exclude_none=True), "settings": self.settings}

        try:
            family = spec.build_family()
            grid = spec.grid.build()
            potential = ComovingPotential.from_family(family)
            nonlinear = spec.nonlinear.build() if spec.nonlinear is not None else None
            s_mu = self._nonlinear_frame_constant(family, nonlinear)
            manifest["family"] = describe(family)
            manifest["potential"] = potential.to_dict()
            manifest["nonlinear"] = nonlinear.to_dict() if nonlinear else None
            manifest["grid"] = grid.to_dict()

            initial = assemble_lab_frame(family, grid, 0.0, s_mu=s_mu)
            if spec.window is not None:
                initial.amplitudes *= spec.window.apply(grid.x)
            config = spec.propagator.build()
            manifest["propagator"] = config.to_dict()

            try:
                record = propagate(initial, potential, nonlinear, config)
            except AccelwaveError as exc:
                record = getattr(exc, "record", None)
                errors.append(exc.to_dict())

            if record is not None and record.times:
                rows, summary = self.analyse(spec, family, potential, record, s_mu)
                summary["propagation"] = record.summary()
                artifacts += [p.name for p in write_fields(record, out_dir, spec.output.field_stride)]
                artifacts.append(write_rows(rows, out_dir / "timeseries.csv").name)
                if spec.output.density_map:
                    try:
                        summary["density_map"] = emit_density_pgm(record, out_dir / "density.pgm")
                        artifacts += ["density.pgm", "density.json", "density.csv"]
                    except AccelwaveError as exc:
                        errors.append(exc.to_dict())
        except AccelwaveError as exc:
            errors.append(exc.to_dict())

        for error in errors:
            self.logger.error(f"{spec.name}: {error.get('error')}: {error.get('message')}")

        status = "ok" if not errors else "error"
        manifest.update({
            "status": status,
            "diagnostics": summary,
            "errors": errors,
            "artifacts": artifacts,
            "timings": {
                "propagate_s": record.elapsed if record is not None else None,
                "total_s": time.perf_counter() - started,
            },
        })
        write_manifest(manifest, out_dir / "manifest.json")
        self.logger.info(f"Scenario '{spec.name}' finished with status {status} "
                         f"in {format_duration(manifest['timings']['total_s'])}")
        return RunResult(spec.name, out_dir, status, summary, errors[0] if errors else None, record)

    def _nonlinear_frame_constant(self, family: SolutionFamily, nonlinear) -> Optional[float]:
        if nonlinear is None or not nonlinear.active:
            return None
        if not isinstance(family, CONSTANT_INTENSITY):
            self.logger.warning(f"{family.TAG} is not a constant-intensity family; the nonlinear run has no "
                                f"exact counterpart")
            return None
        shifted = nonlinear_mu_shift(family.frame.mu, nonlinear.sigma_nl, nonlinear.p)
        self.logger.info(f"Nonlinear frame constant mu' = {shifted:g} (mu = {family.frame.mu:g})")
        return shifted

    def analyse(self, spec: ScenarioSpec, family: SolutionFamily, potential: ComovingPotential,
                record: PropagationRecord, s_mu: Optional[float]) -> Tuple[List[Dict[str, Any]], Dict[str, Any]]:
        """
        Time-series rows and summary diagnostics of a propagation record

        Returns:
            (rows for timeseries.csv, summary for the manifest)
        """
        diag = spec.diagnostics
        frame = family.frame
        grid = record.fields[0].grid if record.fields else spec.grid.build()
        constant_intensity = isinstance(family, CONSTANT_INTENSITY)
        exact = s_mu is not None or spec.nonlinear is None or not spec.nonlinear.build().active

        rows = record.rows()
        tracked = np.full(len(rows), np.nan)
        interior = None
        for i, (row, snapshot) in enumerate(zip(rows, record.fields)):
            t = snapshot.t
            centre = frame.x_c(t) + diag.track_offset
            row["expected"] = centre
            search = (centre - diag.search_half_width, centre + diag.search_half_width) \
                if diag.search_half_width else None
            interior = (centre - diag.interior_half_width, centre + diag.interior_half_width) \
                if diag.interior_half_width else None
            try:
                tracked[i] = self._track(diag.track, snapshot, record.centroids[i], search, frame.velocity(t),
                                         centre)
            except AccelwaveError as exc:
                self.logger.debug(f"Tracking failed at t={t:.4g}: {exc}")
            row["tracked"] = tracked[i]
            if constant_intensity:
                try:
                    row["flatness"] = intensity_flatness(
                        snapshot, interior or (grid.x_min, grid.x[-1]), diag.flatness_target)
                except AccelwaveError:
                    row["flatness"] = float("nan")
            if diag.compare_analytic and exact:
                comparison = compare_to_analytic(snapshot, family, t, window=interior, s_mu=s_mu)
                row["analytic_l_inf"] = comparison["l_inf"]
                row["analytic_l2"] = comparison["l2"]

        summary: Dict[str, Any] = {
            "track": diag.track,
            "final_interior_window": list(interior) if interior else None,
            "norm_ratio": record.norms[-1] / record.norms[0] if record.norms[0] > 0 else None,
            "tracking_max_deviation": float(np.nanmax(np.abs(tracked - np.array([r["expected"] for r in rows]))))
            if np.isfinite(tracked).any() else None,
            "gain_loss": gain_loss_summary(potential.imag_at(grid.x, record.times[0]), grid.dx),
            "pt_symmetric": pt_symmetric(potential, np.linspace(-10.0, 10.0, 201), (0.0, 0.5, 1.0)),
            "stability_warning": record.stability_warning,
        }
        if constant_intensity:
            flat = [row.get("flatness", np.nan) for row in rows]
            summary["flatness_max"] = float(np.nanmax(flat)) if np.isfinite(flat).any() else None
            summary["flatness_final"] = flat[-1]
            note = regime_note(family)
            if note:
                summary["regime_note"] = note
        if rows and "analytic_l_inf" in rows[-1]:
            summary["analytic_final"] = {"l_inf": rows[-1]["analytic_l_inf"], "l2": rows[-1]["analytic_l2"]}

        summary["fit"] = self._fit(record, tracked, diag, frame)

        if diag.shape_time is not None and record.fields:
            snapshot = record.field_at(diag.shape_time)
            shape_window = None
            if diag.interior_half_width:
                centre = frame.x_c(snapshot.t) + diag.track_offset
                shape_window = (centre - diag.interior_half_width, centre + diag.interior_half_width)
            summary["shape_error"] = {"t": snapshot.t, "max_abs": shape_error(snapshot, family, window=shape_window)}

        summary["ehrenfest"] = self._ehrenfest(record, family)
        return rows, summary

    @staticmethod
    def _track(mode: str, snapshot, centroid_value: float, search, velocity: float, centre: float) -> float:
        if mode == "centroid":
            return centroid_value
        if mode == "source":
            return source_position(snapshot, velocity, search or (centre - 1.0, centre + 1.0))
        return peak_position(snapshot, "max" if mode == "peak" else "min", search).position

    def _fit(self, record: PropagationRecord, tracked: np.ndarray, diag, frame: FrameParams) -> Dict[str, Any]:
        t_max = diag.fit_t_max if diag.fit_t_max is not None else record.times[-1]
        try:
            trajectory = Trajectory(np.asarray(record.times), tracked, np.asarray(record.norms),
                                    diag.track)
            fit = fit_parabola(trajectory.between(diag.fit_t_min, t_max))
        except AccelwaveError as exc:
            self.logger.warning(f"Parabola fit skipped: {exc}")
            return {"error": exc.to_dict()}
        result = {**fit.to_dict(), "t_min": diag.fit_t_min, "t_max": t_max, "expected_acc": frame.a}
        if frame.a != 0.0:
            result["acc_rel_error"] = abs(fit.acc - frame.a) / abs(frame.a)
        self.logger.info(f"Fitted acceleration {fit.acc:.6g} (expected {frame.a:g}), rms {fit.rms_residual:.3g}")
        return result

    def _ehrenfest(self, record: PropagationRecord, family: SolutionFamily) -> Optional[Dict[str, Any]]:
        try:
            residual = ehrenfest_residual(record, family.v_real, family.frame, family.v_real_d1)
        except AccelwaveError as exc:
            self.logger.debug(f"Ehrenfest residual skipped: {exc}")
            return None
        interior = residual[1:-1] if residual.size > 2 else residual
        return {"mean": float(np.mean(interior)), "min": float(np.min(interior)), "max": float(np.max(interior)),
                "samples": int(interior.size)}

    # ============================= Adjudication =============================

    def _run_adjudicate(self, spec: ScenarioSpec, out_dir: Path) -> RunResult:
        started = time.perf_counter()
        section = spec.adjudicate
        claims = section.claims if section else ["dark_soliton_mu", "c_shift"]
        steps = tuple(section.steps) if section else (0.004, 0.002, 0.001)
        workers = section.workers if section else 1
        builders = {"dark_soliton_mu": dark_soliton_claim, "c_shift": nonlinear_shift_claim}

        decisions, errors, rows = [], [], []
        for name in claims:
            claim = builders[name](steps=steps)
            try:
                decision = adjudicate(claim, max_workers=workers).to_dict()
            except Inconclusive as exc:
                decision = exc.details.get("record", {})
                errors.append(exc.to_dict())
            except AccelwaveError as exc:
                errors.append(exc.to_dict())
                continue
            decisions.append(decision)
            for ladder in decision.get("ladders", []):
                for level in ladder["levels"]:
                    rows.append({"parameter": decision["parameter"], "value": ladder["value"],
                                 "h": level["grid_step"], "l_inf": level["l_inf"], "l2": level["l2"],
                                 "order": ladder["convergence_order"], "converged": ladder["converged"]})

        if rows:
            write_rows(rows, out_dir / "adjudication.csv")
        status = "ok" if not errors else "error"
        summary = {
            "decisions": [{"parameter": d.get("parameter"), "selected": d.get("selected"),
                           "frozen": d.get("frozen"), "agrees_with_frozen": d.get("agrees_with_frozen")}
                          for d in decisions],
        }
        manifest = {"scenario": spec.model_dump(exclude_none=True), "status": status, "decisions": decisions,
                    "errors": errors, "settings": self.settings,
                    "timings": {"total_s": time.perf_counter() - started}}
        write_manifest(manifest, out_dir / "manifest.json")
        return RunResult(spec.name, out_dir, status, {**summary, "ladders": decisions},
                         errors[0] if errors else None)

    # ============================= Synthesis =============================

    def _run_synthesize(self, spec: ScenarioSpec, out_dir: Path) -> RunResult:
        started = time.perf_counter()
        section = spec.synthesize
        errors: List[Dict[str, Any]] = []
        summary: Dict[str, Any] = {}
        family = spec.build_family() if spec.family is not None else None

        try:
            q_tab, psi_tab, v_tab = self._load_table(section, family)
            envelope = EnvelopeProfile.from_table(q_tab, psi_tab, degree=5)
            v_real = make_interp_spline(q_tab, v_tab, k=3) if v_tab is not None else zero_profile
            a = section.a if section.a is not None else (family.frame.a if family else None)
            mu = section.mu if section.mu is not None else (family.frame.mu if family else None)
            if a is None or mu is None:
                raise ValidationError("synthesis needs the frame constants a and mu", invariant="frame given")
            frame = FrameParams(a, mu)

            result = synthesize(envelope, v_real, frame, domain=(section.domain_min, section.domain_max),
                                right_sign=section.right_sign)
            n_out = int(round((section.domain_max - section.domain_min) / 0.01)) + 1
            q = np.linspace(section.domain_min, section.domain_max, n_out)
            g = result.g_values(q, strict=False)
            v_imag = result.v_imag(q, strict=False)
            valid = result.valid(q)
            write_profiles(q, {"psi": envelope.value(q), "v_real": v_real(q), "G": g, "V_I": v_imag,
                               "valid": valid.astype(float)}, out_dir / "profiles.csv")

            summary.update({
                "frame": frame.to_dict(),
                "branch": result.branch_rule(),
                "valid_fraction": float(valid.mean()),
                "derivative_scheme": envelope.derivative_scheme,
            })
            good = valid & np.isfinite(v_imag)
            summary["residual_G"] = ode_residual_G(envelope, result.g, v_real, frame, q[valid]).to_dict()
            summary["residual_VI"] = ode_residual_VI(result.g, envelope, result.v_imag, q[good],
                                                     derivative_scheme="centered-fd(4)").to_dict()
            if family is not None and section.table == "family":
                summary["closed_form_check"] = self._closed_form_check(family, result, q, section)
        except AccelwaveError as exc:
            errors.append(exc.to_dict())
            self.logger.error(f"Synthesis failed: {exc}")

        status = "ok" if not errors else "error"
        manifest = {"scenario": spec.model_dump(exclude_none=True), "status": status, "synthesis": summary,
                    "errors": errors, "settings": self.settings,
                    "timings": {"total_s": time.perf_counter() - started}}
        write_manifest(manifest, out_dir / "manifest.json")
        return RunResult(spec.name, out_dir, status, summary, errors[0] if errors else None)

    @staticmethod
    def _load_table(section, family: Optional[SolutionFamily]):
        if section.table == "family":
            margin = 50 * section.spacing
            n = int(round((section.domain_max - section.domain_min + 2 * margin) / section.spacing)) + 1
            q = np.linspace(section.domain_min - margin, section.domain_max + margin, n)
            return q, np.asarray(family.psi(q)), np.asarray(family.v_real(q))
        path = Path(section.table)
        try:
            table = np.genfromtxt(path, delimiter=",", names=True)
        except OSError as exc:
            raise IOFailure(f"cannot read envelope table {path}: {exc}", path=str(path)) from exc
        names = table.dtype.names or ()
        if "q" not in names or "psi" not in names:
            raise ValidationError(f"envelope table {path} needs columns q and psi, got {names}",
                                  invariant="table has q, psi")
        order = np.argsort(table["q"])
        v_tab = table["v_real"][order] if "v_real" in names else None
        return table["q"][order], table["psi"][order], v_tab

    @staticmethod
    def _closed_form_check(family: SolutionFamily, result, q: np.ndarray, section) -> Dict[str, Any]:
        mask = (np.abs(q) >= section.check_min) & (np.abs(q) <= section.check_max)
        qc = q[mask]
        return {
            "q_range": [section.check_min, section.check_max],
            "samples": int(qc.size),
            "v_imag_max_error": float(np.max(np.abs(result.v_imag(qc, strict=False) - family.v_imag(qc)))),
            "g_max_error": float(np.max(np.abs(result.g_values(qc, strict=False) - family.g(qc)))),
        }


def run_scenario(spec: ScenarioSpec, out_dir: Optional[Path] = None, **runner_options) -> RunResult:
    """Run one scenario with a fresh ScenarioRunner"""
    return ScenarioRunner(**runner_options).run(spec, out_dir)
