import numpy as np
import pytest

from core.errors import NormFloor, ValidationError
from diagnostics.measures import (
    centroid, gain_loss_summary, intensity_flatness, local_wavenumber, norm, peak_position, source_position
)
from propagation.grid import ComplexWaveField, Grid1D

PERIODIC = Grid1D(-np.pi, np.pi, 256)


class TestMass:
    def test_norm_and_centroid(self, packet):
        field = packet(Grid1D(-12.0, 12.0, 512), x0=1.5)
        assert norm(field) == pytest.approx(np.sqrt(np.pi), rel=1e-10)
        assert centroid(field) == pytest.approx(1.5, abs=1e-10)

    def test_centroid_undefined_for_empty_field(self):
        grid = Grid1D(-1.0, 1.0, 32)
        with pytest.raises(NormFloor):
            centroid(ComplexWaveField(grid, np.zeros(grid.n)))


class TestPeakPosition:
    def test_off_grid_maximum(self, packet):
        """Parabolic refinement recovers a maximum between samples"""
        field = packet(Grid1D(-5.0, 5.0, 100), x0=0.03)
        result = peak_position(field)
        assert not result.degenerate
        assert result.position == pytest.approx(0.03, abs=2e-3)
        assert result.value == pytest.approx(np.max(field.density))

    def test_density_minimum(self):
        grid = Grid1D(-5.0, 5.0, 200)
        field = ComplexWaveField(grid, np.tanh(grid.x - 0.52))
        assert peak_position(field, mode="min").position == pytest.approx(0.52, abs=5e-3)

    def test_constant_field_is_degenerate(self):
        grid = Grid1D(-1.0, 1.0, 32)
        result = peak_position(ComplexWaveField(grid, np.ones(grid.n)))
        assert result.degenerate
        assert result.index == 0

    def test_window_restricts_search(self, packet):
        grid = Grid1D(-10.0, 10.0, 400)
        field = ComplexWaveField(grid, packet(grid, x0=-4.0).amplitudes + 0.5 * packet(grid, x0=4.0).amplitudes)
        assert peak_position(field).position == pytest.approx(-4.0, abs=1e-2)
        assert peak_position(field, window=(0.0, 8.0)).position == pytest.approx(4.0, abs=1e-2)

    def test_rejects_bad_arguments(self, packet):
        field = packet(Grid1D(-5.0, 5.0, 100))
        with pytest.raises(ValidationError):
            peak_position(field, mode="median")
        with pytest.raises(ValidationError):
            peak_position(field, window=(0.01, 0.02))


class TestFlatness:
    def test_deviation_from_target(self):
        field = ComplexWaveField(PERIODIC, np.sqrt(1.0 + 0.02 * np.cos(PERIODIC.x)))
        assert intensity_flatness(field, (-1.0, 1.0)) == pytest.approx(0.02, rel=1e-9)
        # edge samples fall just inside |x| = 1
        edge = 0.02 * (1.0 - np.cos(1.0))
        assert intensity_flatness(field, (-1.0, 1.0), target=1.02) == pytest.approx(edge, rel=0.1)

    def test_window_outside_grid(self):
        field = ComplexWaveField(PERIODIC, np.ones(PERIODIC.n))
        with pytest.raises(ValidationError):
            intensity_flatness(field, (0.0, 5.0))


class TestLocalWavenumber:
    def test_plane_wave(self):
        field = ComplexWaveField(PERIODIC, np.exp(3j * PERIODIC.x))
        np.testing.assert_allclose(local_wavenumber(field), 3.0, atol=1e-10)

    def test_masked_where_empty(self):
        amplitudes = np.exp(1j * PERIODIC.x)
        amplitudes[:10] = 0.0
        k = local_wavenumber(ComplexWaveField(PERIODIC, amplitudes))
        assert np.isnan(k[:10]).all()


class TestSourcePosition:
    def test_sign_change(self):
        """k(x) = cos x meets 0.5 at x = pi / 3 inside (0, 2)"""
        field = ComplexWaveField(PERIODIC, np.exp(1j * np.sin(PERIODIC.x)))
        assert source_position(field, 0.5, (0.0, 2.0)) == pytest.approx(np.pi / 3, abs=1e-3)
        assert source_position(field, 0.5, (-2.0, 0.0)) == pytest.approx(-np.pi / 3, abs=1e-3)

    def test_closest_approach(self):
        """k(x) = cos x never reaches 1.5; its closest point is x = 0"""
        field = ComplexWaveField(PERIODIC, np.exp(1j * np.sin(PERIODIC.x)))
        assert source_position(field, 1.5, (-1.0, 1.0)) == pytest.approx(0.0, abs=1e-9)


class TestGainLoss:
    def test_mixed(self):
        summary = gain_loss_summary([-1.0, 0.0, 1.0, 2.0], dx=0.5)
        assert summary == {"integral": 1.0, "gain_fraction": 0.5, "loss_fraction": 0.25, "character": "mixed"}

    @pytest.mark.parametrize("samples,character", [
        ([0.0, 0.0], "neutral"),
        ([0.1, 0.0], "gain-only"),
        ([-0.1, -0.2], "loss-only"),
    ])
    def test_character(self, samples, character):
        assert gain_loss_summary(samples, dx=1.0)["character"] == character
