import json

import numpy as np
import pytest

import experiments.runner as runner_module
from core.errors import Overflow
from experiments.config_parser import parse_config
from experiments.output import read_pgm
from experiments.presets import load_preset
from experiments.runner import ScenarioRunner, regime_note, run_scenario
from propagation.propagator import PropagationRecord
from solutions.families import ConstIntensityInvHarm, GaussianLocalized

from tests.experiments.test_config_parser import SMALL

CENTROID = SMALL + "\n[diagnostics]\ntrack = centroid\n\n[output]\nfield_stride = 5\n"


def _manifest(path):
    return json.loads((path / "manifest.json").read_text())


class TestPropagateScenario:
    def test_artifacts_and_fit(self, tmp_path):
        result = run_scenario(parse_config(CENTROID), tmp_path / "run")
        assert result.ok
        names = {p.name for p in (tmp_path / "run").iterdir()}
        assert {"manifest.json", "timeseries.csv", "density.pgm", "density.json", "density.csv"} <= names
        assert {"fields_t0.0000.csv", "fields_t0.2000.csv"} <= names

        fit = result.summary["fit"]
        assert fit["expected_acc"] == 1.0
        assert fit["acc"] == pytest.approx(1.0, abs=1e-2)
        assert result.summary["analytic_final"]["l_inf"] < 1e-4
        assert result.summary["norm_ratio"] == pytest.approx(1.0, rel=1e-4)
        assert result.summary["ehrenfest"]["mean"] == pytest.approx(1.0, abs=0.05)
        assert result.summary["gain_loss"]["character"] == "mixed"

        manifest = _manifest(tmp_path / "run")
        assert manifest["status"] == "ok"
        assert manifest["family"]["family"] == "GaussianLocalized"
        assert manifest["errors"] == []

    def test_deterministic(self, tmp_path):
        spec = parse_config(CENTROID)
        run_scenario(spec, tmp_path / "a")
        run_scenario(spec, tmp_path / "b")
        assert (tmp_path / "a" / "timeseries.csv").read_bytes() == (tmp_path / "b" / "timeseries.csv").read_bytes()
        assert (tmp_path / "a" / "density.pgm").read_bytes() == (tmp_path / "b" / "density.pgm").read_bytes()

    def test_scheme_override(self, tmp_path):
        result = ScenarioRunner(scheme="crank-nicolson").run(parse_config(CENTROID), tmp_path / "cn")
        assert result.ok
        assert _manifest(tmp_path / "cn")["propagator"]["scheme"] == "crank-nicolson"

    def test_failure_keeps_partial_outputs(self, tmp_path, monkeypatch):
        def overflowing(initial, potential, nonlinear, config):
            record = PropagationRecord(config=config)
            record.add(initial)
            exc = Overflow("max|Psi| above ceiling", t=0.0)
            exc.record = record
            raise exc

        monkeypatch.setattr(runner_module, "propagate", overflowing)
        result = run_scenario(parse_config(CENTROID), tmp_path / "run")
        assert result.status == "error"
        assert result.error["error"] == "Overflow"

        manifest = _manifest(tmp_path / "run")
        assert manifest["status"] == "error"
        assert [error["error"] for error in manifest["errors"]] == ["Overflow", "InsufficientSnapshots"]
        assert "timeseries.csv" in manifest["artifacts"]
        assert (tmp_path / "run" / "fields_t0.0000.csv").is_file()


class TestSweep:
    @pytest.mark.parametrize("concurrent", [False, True])
    def test_sub_runs(self, tmp_path, concurrent):
        text = CENTROID + "\n[sweep]\nparameter = propagator.t_end\nvalues = 0.1, 0.2\n"
        result = ScenarioRunner(concurrent_sweep=concurrent).run(parse_config(text), tmp_path / "sweep")
        assert result.ok
        assert [child.out_dir.name for child in result.children] == ["t_end_0.1", "t_end_0.2"]
        assert [child.record.times[-1] for child in result.children] == pytest.approx([0.1, 0.2])
        assert len(result.summary["acc_rel_errors"]) == 2

        manifest = _manifest(tmp_path / "sweep")
        assert manifest["sweep"]["parameter"] == "propagator.t_end"
        assert (tmp_path / "sweep" / "t_end_0.2" / "manifest.json").is_file()


class TestRegimeNote:
    def test_above_threshold_is_flagged(self):
        note = regime_note(ConstIntensityInvHarm(1.0, 1.0, 1.0))
        assert "above the constant-gain value" in note
        assert "mu = 1" in note

    def test_threshold_and_other_families_are_not(self):
        assert regime_note(ConstIntensityInvHarm(1.0, 1.0, 0.25)) is None
        assert regime_note(GaussianLocalized(1.0, 1.0)) is None

class TestSynthesizeScenario:
    def test_gaussian_table(self, tmp_path):
        result = run_scenario(load_preset("synthesize"), tmp_path / "syn")
        assert result.ok
        assert result.summary["closed_form_check"]["v_imag_max_error"] < 1e-6
        header = (tmp_path / "syn" / "profiles.csv").read_text().splitlines()[0]
        assert header == "q,psi,v_real,G,V_I,valid"

    def test_missing_table(self, tmp_path):
        spec = load_preset("synthesize").with_value("synthesize.table", str(tmp_path / "absent.csv"))
        result = run_scenario(spec, tmp_path / "syn")
        assert result.status == "error"
        assert result.error["error"] == "IOFailure"


@pytest.mark.slow
class TestShippedPresets:
    def test_gaussian(self, tmp_path):
        """Peak accelerates at a = 1 with the shape kept"""
        result = run_scenario(load_preset("fig1"), tmp_path / "fig1")
        assert result.ok
        assert result.summary["fit"]["acc"] == pytest.approx(1.0, abs=0.02)
        assert result.summary["shape_error"]["max_abs"] < 5e-4

        sidecar = result.summary["density_map"]
        pixels = read_pgm(tmp_path / "fig1" / "density.pgm")
        columns = np.argmax(pixels, axis=1)
        expected = (0.5 * np.asarray(sidecar["times"]) ** 2 - 1.0 - sidecar["x_first"]) / sidecar["dx"]
        assert np.max(np.abs(columns - expected)) <= 2

    def test_adjudicate(self, tmp_path):
        result = run_scenario(load_preset("adjudicate"), tmp_path / "adj")
        assert result.ok
        assert [d["agrees_with_frozen"] for d in result.summary["decisions"]] == [True, True]
        assert (tmp_path / "adj" / "adjudication.csv").is_file()

    def test_const_intensity(self, tmp_path):
        """mu = 0.25 stays flat in the interior and its flow source follows x_c(t) + 0.5"""
        result = run_scenario(load_preset("const-intensity"), tmp_path / "const")
        assert result.ok
        assert [run["dir"] for run in result.summary["runs"]] == ["mu_0.25", "mu_1"]
        dx = 400.0 / 65536

        threshold = result.summary["runs"][0]["summary"]
        assert threshold["flatness_max"] < 5e-3
        assert threshold["fit"]["acc"] == pytest.approx(1.0, abs=0.02)
        assert threshold["tracking_max_deviation"] <= 2 * dx
        assert "regime_note" not in threshold

        above = result.summary["runs"][1]["summary"]
        assert "regime_note" in above
        assert "regime_note" in _manifest(tmp_path / "const" / "mu_1")["diagnostics"]

    def test_nonlinear_equivalence(self, tmp_path):
        """p = 2 and p = 4 agree up to one global phase at t = 1"""
        result = run_scenario(load_preset("nonlinear-equivalence"), tmp_path / "nl")
        assert result.ok
        [comparison] = result.summary["final_comparison"]
        assert comparison["value"] == 4
        assert comparison["l_inf"] < 1e-3

    def test_airy_truncated(self, tmp_path):
        """Acceleration error grows as the window narrows"""
        result = run_scenario(load_preset("airy-truncated"), tmp_path / "airy")
        assert result.ok
        errors = result.summary["acc_rel_errors"]
        assert len(errors) == 3
        assert errors[0] < 0.05
        assert result.summary["acc_error_monotonic"]

    def test_dark_soliton(self, tmp_path):
        """Density minimum stays within one grid spacing of x_c(t)"""
        result = run_scenario(load_preset("dark-soliton"), tmp_path / "dark")
        assert result.ok
        assert result.summary["tracking_max_deviation"] <= 60.0 / 2048
        assert result.summary["fit"]["acc"] == pytest.approx(1.0, abs=0.02)
