import numpy as np
import pytest

from core.errors import Overflow, ValidationError
from diagnostics.comparison import compare_fields, compare_to_analytic
from diagnostics.measures import norm
from diagnostics.trajectory import Trajectory, ehrenfest_residual, fit_parabola
from oracle.residuals import estimate_order
from propagation.crank_nicolson import apply_periodic_tridiagonal, solve_periodic_tridiagonal
from propagation.grid import ComplexWaveField, Grid1D
from propagation.potential import Absorber, ComovingPotential
from propagation.propagator import PropagatorConfig, propagate
from solutions.families import ConstIntensityInvHarm
from solutions.frame import FrameParams
from solutions.lab_frame import assemble_lab_frame

SCHEMES = ["split-step", "crank-nicolson"]


def _run_exact(family, grid, dt, t_end=1.0, scheme="split-step", stride=None):
    n_steps = int(round(t_end / dt))
    config = PropagatorConfig(dt=dt, n_steps=n_steps, scheme=scheme, record_stride=stride or n_steps)
    initial = assemble_lab_frame(family, grid, 0.0)
    return propagate(initial, ComovingPotential.from_family(family), None, config)


class TestPeriodicTridiagonal:
    def test_matches_dense_solve(self):
        rng = np.random.default_rng(7)
        n = 9
        diag = 4.0 + rng.normal(size=n) + 1j * rng.normal(size=n)
        off = 0.7 - 0.3j
        rhs = rng.normal(size=n) + 1j * rng.normal(size=n)

        dense = np.diag(diag) + off * (np.eye(n, k=1) + np.eye(n, k=-1))
        dense[0, -1] = dense[-1, 0] = off
        x = solve_periodic_tridiagonal(diag, off, rhs)
        np.testing.assert_allclose(x, np.linalg.solve(dense, rhs), atol=1e-12)
        np.testing.assert_allclose(apply_periodic_tridiagonal(diag, off, x), rhs, atol=1e-12)


class TestNormLaw:
    @pytest.mark.parametrize("scheme", SCHEMES)
    def test_free_propagation_is_unitary(self, scheme, packet):
        grid = Grid1D(-20.0, 20.0, 512)
        config = PropagatorConfig(dt=1e-3, n_steps=200, scheme=scheme, record_stride=200)
        record = propagate(packet(grid), ComovingPotential.free(), None, config)
        assert record.norms[-1] == pytest.approx(record.norms[0], rel=1e-10)

    @pytest.mark.parametrize("scheme", SCHEMES)
    def test_uniform_gain(self, scheme, packet):
        """V_I = 0.3 grows the norm as exp(2 * 0.3 * t)"""
        grid = Grid1D(-40.0, 40.0, 1024)
        config = PropagatorConfig(dt=1e-3, n_steps=1000, scheme=scheme, record_stride=1000)
        record = propagate(packet(grid, width=5.0), ComovingPotential.uniform(v_imag=0.3), None, config)
        assert record.times[-1] == pytest.approx(1.0)
        assert record.norms[-1] / record.norms[0] == pytest.approx(np.exp(0.6), rel=1e-6)

    def test_hermitian_norm_over_long_run(self, packet):
        """10^4 split-step steps in a real harmonic well keep the norm to 1e-8"""
        grid = Grid1D(-20.0, 20.0, 512)
        potential = ComovingPotential(v_real=lambda q: 0.5 * np.asarray(q) ** 2,
                                      v_imag=lambda q: 0.0 * np.asarray(q), frame=FrameParams(0.0))
        config = PropagatorConfig(dt=1e-3, n_steps=10_000, record_stride=1000, store_fields=False)
        record = propagate(packet(grid, x0=2.0), potential, None, config)
        assert record.steps_completed == 10_000
        drift = np.abs(np.asarray(record.norms) - record.norms[0]) / record.norms[0]
        assert np.max(drift) < 1e-8


class TestExactSolutions:
    def test_split_step_reproduces_gaussian(self, gaussian, wide_grid):
        record = _run_exact(gaussian, wide_grid, 1e-3)
        assert compare_to_analytic(record.final, gaussian)["l_inf"] < 1e-4
        assert record.norms[-1] == pytest.approx(record.norms[0], rel=1e-4)

    def test_crank_nicolson_reproduces_gaussian(self, gaussian, wide_grid):
        """Limited by the three-point Laplacian rather than by dt"""
        record = _run_exact(gaussian, wide_grid, 1e-3, scheme="crank-nicolson")
        assert compare_to_analytic(record.final, gaussian)["l_inf"] < 1e-3

    def test_second_order_in_dt(self, gaussian, wide_grid):
        steps = (0.004, 0.002, 0.001)
        errors = [compare_to_analytic(_run_exact(gaussian, wide_grid, dt).final, gaussian)["l_inf"] for dt in steps]
        assert errors[0] > errors[1] > errors[2]
        assert estimate_order(steps, errors) == pytest.approx(2.0, abs=0.2)

    def test_centroid_accelerates(self, gaussian, wide_grid):
        """<x>(t) = a t^2 / 2 - a / omega^2 for the shape-invariant Gaussian"""
        record = _run_exact(gaussian, wide_grid, 1e-3, stride=10)
        fit = fit_parabola(Trajectory.from_record(record))
        assert fit.acc == pytest.approx(1.0, abs=0.02)
        assert fit.x0 == pytest.approx(gaussian.centroid_offset, abs=1e-3)

    def test_gain_loss_drives_the_acceleration(self, gaussian, wide_grid):
        """With V_R = 0 the whole acceleration shows up as an Ehrenfest residual"""
        record = _run_exact(gaussian, wide_grid, 1e-3, stride=10)
        residual = ehrenfest_residual(record, gaussian.v_real, gaussian.frame)
        assert residual.size == len(record.times) - 2
        assert float(np.mean(residual)) == pytest.approx(1.0, abs=0.05)

    def test_schemes_agree(self, gaussian, wide_grid):
        """Split-step and Crank-Nicolson finals differ by no more than their combined error against the exact wave"""
        split = _run_exact(gaussian, wide_grid, 1e-3)
        implicit = _run_exact(gaussian, wide_grid, 1e-3, scheme="crank-nicolson")
        assert compare_fields(implicit.final, split.final)["l_inf"] < 1e-3 + 1e-4
        assert implicit.norms[-1] == pytest.approx(split.norms[-1], rel=1e-3)


class TestAbsorberLocality:
    def test_interior_untouched(self):
        """A windowed constant-intensity wave far from the edges evolves the same with and without the absorber"""
        family = ConstIntensityInvHarm(1.0, 1.0, 0.25)
        grid = Grid1D(-40.0, 40.0, 1024)
        exact = assemble_lab_frame(family, grid, 0.0)
        window = np.exp(-(grid.x - 0.5) ** 2 / (2.0 * 3.0 ** 2))
        initial = ComplexWaveField(grid, exact.amplitudes * window, 0.0)
        potential = ComovingPotential.from_family(family)

        absorber = Absorber()
        runs = [propagate(initial, potential, None, PropagatorConfig(dt=1e-3, n_steps=200, record_stride=200,
                                                                     absorber=layer))
                for layer in (None, absorber)]
        lo, hi = absorber.interior(grid)
        inside = (grid.x > lo) & (grid.x < hi)
        densities = [np.abs(run.final.amplitudes[inside]) ** 2 for run in runs]
        assert np.max(densities[0]) > 0.5
        assert np.max(np.abs(densities[0] - densities[1])) < 1e-8


class TestHermitianControl:
    def test_harmonic_oscillator_obeys_ehrenfest(self, packet):
        grid = Grid1D(-10.0, 10.0, 256)
        potential = ComovingPotential(v_real=lambda q: 0.5 * np.asarray(q) ** 2,
                                      v_imag=lambda q: 0.0 * np.asarray(q), frame=FrameParams(0.0))
        config = PropagatorConfig(dt=1e-3, n_steps=500, record_stride=10)
        record = propagate(packet(grid, x0=1.0), potential, None, config)
        residual = ehrenfest_residual(record, potential.v_real, v_real_d1=lambda q: np.asarray(q, dtype=float))
        assert np.max(np.abs(residual)) < 1e-4


class TestRecording:
    def test_stride_and_last_step(self, packet):
        grid = Grid1D(-10.0, 10.0, 128)
        config = PropagatorConfig(dt=1e-3, n_steps=10, record_stride=4)
        record = propagate(packet(grid), ComovingPotential.free(), None, config)
        assert record.times == pytest.approx([0.0, 0.004, 0.008, 0.010])
        assert len(record.fields) == 4
        assert record.steps_completed == 10
        assert list(record.rows()[0]) == ["t", "norm", "centroid", "peak", "max_abs"]

    def test_fields_optional(self, packet):
        grid = Grid1D(-10.0, 10.0, 128)
        config = PropagatorConfig(dt=1e-3, n_steps=4, store_fields=False)
        record = propagate(packet(grid), ComovingPotential.free(), None, config)
        assert record.final is None
        assert len(record.norms) == 5
        assert norm(packet(grid)) == pytest.approx(np.sqrt(np.pi), rel=1e-10)


class TestFailures:
    def test_overflow_keeps_partial_record(self, packet):
        """exp(50 t) crosses the ceiling 10 after about 46 steps"""
        grid = Grid1D(-10.0, 10.0, 128)
        config = PropagatorConfig(dt=1e-3, n_steps=100, ceiling=10.0)
        with pytest.raises(Overflow) as info:
            propagate(packet(grid), ComovingPotential.uniform(v_imag=50.0), None, config)
        record = info.value.record
        assert 0 < record.steps_completed < 100
        assert record.error["step"] == record.steps_completed + 1
        assert record.times[-1] == pytest.approx(record.steps_completed * 1e-3)

    def test_stability_warning(self, packet):
        grid = Grid1D(-10.0, 10.0, 128)
        config = PropagatorConfig(dt=1e-3, n_steps=1)
        record = propagate(packet(grid), ComovingPotential.uniform(v_imag=600.0), None, config)
        assert record.stability_warning
        quiet = propagate(packet(grid), ComovingPotential.uniform(v_imag=0.3), None, config)
        assert not quiet.stability_warning

    @pytest.mark.parametrize("kwargs", [
        {"dt": 0.0, "n_steps": 10},
        {"dt": 1e-3, "n_steps": -1},
        {"dt": 1e-3, "n_steps": 10, "scheme": "euler"},
        {"dt": 1e-3, "n_steps": 10, "record_stride": 0},
    ])
    def test_rejects_bad_config(self, kwargs):
        with pytest.raises(ValidationError):
            PropagatorConfig(**kwargs)
