import numpy as np
import pytest

from core.errors import ValidationError
from diagnostics.comparison import compare_fields, compare_to_analytic, shape_error
from propagation.grid import ComplexWaveField, Grid1D
from solutions.lab_frame import assemble_lab_frame


class TestCompareFields:
    def test_global_phase(self, packet):
        grid = Grid1D(-10.0, 10.0, 256)
        reference = packet(grid)
        rotated = ComplexWaveField(grid, reference.amplitudes * np.exp(0.7j))

        raw = compare_fields(rotated, reference)
        assert raw["l_inf"] == pytest.approx(abs(1.0 - np.exp(0.7j)), rel=1e-9)
        assert raw["phase"] == 0.0

        aligned = compare_fields(rotated, reference, phase_aligned=True)
        assert aligned["phase"] == pytest.approx(0.7, abs=1e-12)
        assert aligned["l2"] < 1e-12

    def test_window(self, packet):
        grid = Grid1D(-10.0, 10.0, 256)
        reference = packet(grid)
        bumped = ComplexWaveField(grid, reference.amplitudes + 0.5 * packet(grid, x0=8.0).amplitudes)
        assert compare_fields(bumped, reference)["l_inf"] == pytest.approx(0.5, rel=1e-3)
        assert compare_fields(bumped, reference, window=(-2.0, 2.0))["l_inf"] < 1e-7
        with pytest.raises(ValidationError):
            compare_fields(bumped, reference, window=(0.01, 0.02))

    def test_grids_must_match(self, packet):
        with pytest.raises(ValidationError):
            compare_fields(packet(Grid1D(-10.0, 10.0, 256)), packet(Grid1D(-10.0, 10.0, 128)))


class TestAnalytic:
    def test_exact_field_has_no_error(self, gaussian, wide_grid):
        field = assemble_lab_frame(gaussian, wide_grid, 0.8)
        errors = compare_to_analytic(field, gaussian)
        assert errors["l_inf"] < 1e-12
        assert shape_error(field, gaussian) < 1e-12

    def test_time_mismatch_shows_up(self, gaussian, wide_grid):
        field = assemble_lab_frame(gaussian, wide_grid, 0.8)
        assert shape_error(field, gaussian, t=1.0) > 0.1
        assert compare_to_analytic(field, gaussian, t=1.0)["l_inf"] > 0.1
