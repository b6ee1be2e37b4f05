import numpy as np
import pytest
from pydantic import ValidationError as PydanticValidationError

from core.errors import ValidationError
from experiments.config_parser import parse_config
from experiments.presets import list_presets, load_preset, preset_path, preset_summaries
from experiments.scenario import ScenarioSpec, TruncationWindow

from tests.experiments.test_config_parser import SMALL


class TestScenarioSpec:
    def test_with_value_revalidates(self):
        spec = parse_config(SMALL)
        assert spec.with_value("family.omega", 2.0).build_family().omega == 2.0
        assert spec.grid.n == 256
        with pytest.raises(ValidationError):
            spec.with_value("grid.n", 4)

    def test_scaled(self):
        spec = parse_config(SMALL).scaled(2.0)
        assert spec.grid.n == 512
        assert spec.propagator.dt == pytest.approx(0.0005)
        assert spec.propagator.record_stride == 40
        assert spec.propagator.n_steps == 400

    def test_scaled_rejects_negative(self):
        with pytest.raises(ValidationError):
            parse_config(SMALL).scaled(-1.0)

    def test_propagate_needs_grid(self):
        with pytest.raises(PydanticValidationError):
            ScenarioSpec.model_validate({"scenario": {"name": "x"}, "family": {"tag": "AiryFree", "a": 1}})

    def test_sweep_key_must_exist(self):
        data = parse_config(SMALL).model_dump(exclude_none=True)
        data["sweep"] = {"parameter": "grid.points", "values": [1.0]}
        with pytest.raises(ValidationError):
            ScenarioSpec.revalidate(data)

    def test_without_sweep(self):
        data = parse_config(SMALL).model_dump(exclude_none=True)
        data["sweep"] = {"parameter": "propagator.t_end", "values": [0.1, 0.2]}
        spec = ScenarioSpec.revalidate(data)
        assert spec.sweep is not None
        assert spec.without_sweep().sweep is None


class TestTruncationWindow:
    def test_hard(self):
        window = TruncationWindow(kind="hard", center=1.0, width=0.5)
        np.testing.assert_array_equal(window.apply([0.0, 0.5, 1.0, 1.5, 2.0]), [0.0, 1.0, 1.0, 1.0, 0.0])

    def test_gaussian(self):
        window = TruncationWindow(width=2.0)
        np.testing.assert_allclose(window.apply([0.0, 2.0]), [1.0, np.exp(-0.5)])

    def test_width_positive(self):
        with pytest.raises(PydanticValidationError):
            TruncationWindow(width=0.0)


class TestPresets:
    def test_shipped(self):
        assert set(list_presets()) == {"adjudicate", "airy-truncated", "const-intensity", "dark-soliton",
                                       "fig1", "nonlinear-equivalence", "synthesize"}

    def test_every_preset_has_a_summary(self):
        assert all(preset_summaries().values())

    def test_gaussian_preset(self):
        spec = load_preset("fig1")
        family = spec.build_family()
        assert (family.omega, family.frame.a) == (1.0, 1.0)
        assert (spec.grid.x_min, spec.grid.x_max, spec.grid.n) == (-20.0, 25.0, 4096)
        assert spec.propagator.n_steps == 4000

    def test_unknown_preset(self):
        with pytest.raises(ValidationError, match="unknown preset"):
            preset_path("no-such-preset")
