"""
Closed-form solution families.

Each family must satisfy both constraints

    G^2 = psi^3 (psi'' + 2 (mu - a q - V_R) psi),    V_I = G' / (2 psi^2)

with its analytic derivatives, to round-off.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from core.errors import ValidationError
from oracle.residuals import ode_residual_G, ode_residual_VI
from solutions.constants import DARK_SOLITON_MU_SIGN
from solutions.describe import describe
from solutions.families import (
    AiryFree, ConstIntensityInvHarm, ConstIntensityPowerLaw, DarkSoliton, GaussianLocalized,
    family_from_mapping
)

AIRY_AT_ZERO = 0.355028053887817
AIRY_PRIME_AT_ZERO = -0.258819403792807

ODE_TOL = 1e-10

FAMILIES = [
    (AiryFree(0.5, 0.0), (-5.0, 3.0)),
    (AiryFree(1.0, 0.3), (-4.0, 3.0)),
    (ConstIntensityInvHarm(1.0, 1.0, 0.25), (-5.0, 5.0)),
    (ConstIntensityInvHarm(1.0, 1.0, 1.0), (-5.0, 5.0)),
    (ConstIntensityInvHarm(0.7, -0.5, 2.0), (-5.0, 5.0)),
    (ConstIntensityPowerLaw(1.0, 2, 1.0), (-4.0, 4.0)),
    (ConstIntensityPowerLaw(0.5, 4, 1.0), (-3.0, 3.0)),
    (GaussianLocalized(1.0, 1.0), (-4.0, 4.0)),
    (GaussianLocalized(2.0, 0.5), (-3.0, 3.0)),
    (DarkSoliton(1.0, 1.0), (-3.0, 3.0)),
    (DarkSoliton(0.5, 2.0), (-5.0, 5.0)),
]


def _ids(cases):
    return [f"{family.TAG}-{i}" for i, (family, _) in enumerate(cases)]


class TestClosedFormResiduals:
    @pytest.mark.parametrize("family,span", FAMILIES, ids=_ids(FAMILIES))
    def test_g_squared_relation(self, family, span):
        """G^2 equals the radicand at 100 points"""
        q = np.linspace(*span, 100)
        report = ode_residual_G(family.envelope(), family.aux_g(), family.v_real, family.frame, q)
        assert report.derivative_scheme == "analytic"
        assert report.l_inf < ODE_TOL

    @pytest.mark.parametrize("family,span", FAMILIES, ids=_ids(FAMILIES))
    def test_imaginary_potential_relation(self, family, span):
        """V_I equals G' / (2 psi^2) at 100 points"""
        q = np.linspace(*span, 100)
        report = ode_residual_VI(family.aux_g(), family.envelope(), family.v_imag, q)
        assert report.skipped == 0
        assert report.l_inf < ODE_TOL


class TestAiryFree:
    def test_values_at_origin(self):
        """(2a)^(1/3) = 1 for a = 1/2, so psi(0) = Ai(0) and psi'(0) = Ai'(0)"""
        family = AiryFree(0.5)
        assert family.psi(0.0) == pytest.approx(AIRY_AT_ZERO, abs=1e-14)
        assert family.psi_d1(0.0) == pytest.approx(AIRY_PRIME_AT_ZERO, abs=1e-14)

    def test_hermitian(self):
        """G, V_R and V_I vanish"""
        family = AiryFree(1.0, 0.5)
        q = np.linspace(-3, 3, 11)
        np.testing.assert_array_equal(family.g(q), 0.0)
        np.testing.assert_array_equal(family.v_imag(q), 0.0)
        np.testing.assert_array_equal(family.v_real(q), 0.0)

    def test_mu_shifts_the_argument(self):
        """psi(q; mu) = psi(q - mu / a; 0)"""
        a, mu = 1.0, 0.4
        q = np.linspace(-2, 2, 9)
        np.testing.assert_allclose(AiryFree(a, mu).psi(q), AiryFree(a).psi(q - mu / a), rtol=1e-13)

    def test_zero_acceleration_rejected(self):
        with pytest.raises(ValidationError):
            AiryFree(0.0)


class TestConstIntensityInvHarm:
    def test_below_threshold_rejected(self):
        """mu = 0.1 < a^2 / (4 V0^2) = 0.25"""
        with pytest.raises(ValidationError) as info:
            ConstIntensityInvHarm(1.0, 1.0, 0.1)
        assert info.value.invariant == "mu >= a^2/(4 V0^2)"

    def test_threshold_constant_gain(self):
        """At the threshold V_I = V0 / sqrt(2) everywhere"""
        family = ConstIntensityInvHarm(1.0, 1.0, 0.25)
        assert family.at_threshold
        q = np.linspace(-10, 10, 201)
        np.testing.assert_allclose(family.v_imag(q), 1.0 / math.sqrt(2.0), atol=1e-10, rtol=0)

    def test_threshold_branch_is_linear(self):
        """G = sqrt(2) (V0 q - a / (2 V0)), changing sign at q = a / (2 V0^2)"""
        V0, a = 1.5, 0.9
        family = ConstIntensityInvHarm(V0, a, a * a / (4 * V0 * V0))
        q = np.linspace(-4, 4, 81)
        np.testing.assert_allclose(family.g(q), math.sqrt(2.0) * (V0 * q - a / (2 * V0)), atol=1e-12)

    def test_above_threshold_positive_root(self):
        """Above the threshold G is the positive square root"""
        family = ConstIntensityInvHarm(1.0, 1.0, 1.0)
        q = np.linspace(-5, 5, 101)
        assert np.all(family.g(q) > 0)
        np.testing.assert_allclose(family.g(q) ** 2, 2 * (1.0 - q + q * q), rtol=1e-13)

    def test_real_potential(self):
        family = ConstIntensityInvHarm(2.0, 1.0, 1.0)
        np.testing.assert_allclose(family.v_real(np.array([1.0, -0.5])), [-4.0, -1.0])

    @pytest.mark.parametrize("V0,a,mu", [(1.0, 1.0, 1.0), (2.0, 1.0, 1.0), (-1.5, 0.8, 0.5)])
    def test_gain_loss_unbalanced(self, V0, a, mu):
        """Symmetric integral of V_I tends to -a / (sqrt(2) |V0|) above the threshold"""
        family = ConstIntensityInvHarm(V0, a, mu)
        limit = -a / (math.sqrt(2.0) * abs(V0))
        assert family.notes()["gain_loss_integral_limit"] == pytest.approx(limit, rel=1e-14)

        # V_I = G' / 2, so the integral over [-L, L] is (G(L) - G(-L)) / 2 with an O(1/L^2) tail
        half_width = 400.0
        integral, _ = quad(family.v_imag, -half_width, half_width, limit=400)
        assert integral == pytest.approx(limit, abs=1e-4)
        assert 0.5 * (family.g(half_width) - family.g(-half_width)) == pytest.approx(integral, abs=1e-8)


class TestConstIntensityPowerLaw:
    @pytest.mark.parametrize("n", [1, 3, 0, 2.5])
    def test_even_power_required(self, n):
        with pytest.raises(ValidationError):
            ConstIntensityPowerLaw(1.0, n, 1.0)

    def test_quadratic_loss(self):
        """n = 2 gives the constant V_I = -V0 / sqrt(2)"""
        family = ConstIntensityPowerLaw(1.0, 2, 1.0)
        q = np.linspace(-3, 3, 7)
        np.testing.assert_allclose(family.v_imag(q), -1.0 / math.sqrt(2.0), rtol=1e-14)
        assert family.frame.mu == 0.0


class TestGaussianLocalized:
    @pytest.mark.parametrize("omega,a", [(1.0, 1.0), (2.0, 1.0), (0.5, -0.3)])
    def test_frame_constant(self, omega, a):
        """mu = (omega - a^2 / omega^2) / 2"""
        family = GaussianLocalized(omega, a)
        assert family.frame.mu == pytest.approx(0.5 * (omega - a * a / omega ** 2), rel=1e-14)

    def test_centroid_offset(self):
        """psi^2 is centred at q = -a / omega^2"""
        family = GaussianLocalized(2.0, 1.0)
        q = np.linspace(-10, 10, 20001)
        density = family.psi(q) ** 2
        assert np.sum(q * density) / np.sum(density) == pytest.approx(family.centroid_offset, abs=1e-10)
        assert family.centroid_offset == pytest.approx(-0.25)

    def test_imaginary_potential(self):
        family = GaussianLocalized(1.0, 1.0)
        q = np.array([-1.0, 0.0, 2.0])
        np.testing.assert_allclose(family.v_imag(q), -q * q - q + 0.5)

    def test_non_positive_width_rejected(self):
        with pytest.raises(ValidationError):
            GaussianLocalized(0.0, 1.0)


class TestDarkSoliton:
    def test_frozen_mu(self):
        """mu = +sigma^2"""
        family = DarkSoliton(0.8, 1.0)
        assert DARK_SOLITON_MU_SIGN == 1.0
        assert family.frame.mu == pytest.approx(0.64)

    def test_rejected_mu_leaves_residual(self):
        """mu = -sigma^2 leaves the G^2 residual -4 sigma^2 psi^4"""
        family = DarkSoliton(1.0, 1.0)
        wrong = family.frame.with_mu(-1.0)
        q = np.linspace(-3, 3, 50)
        report = ode_residual_G(family.envelope(), family.aux_g(), family.v_real, wrong, q)
        assert report.l_inf == pytest.approx(4.0 * np.max(np.tanh(q) ** 4), rel=1e-10)

    def test_notch_samples_skipped(self):
        """psi(0) = 0 is skipped by the V_I check, the rest still passes"""
        family = DarkSoliton(1.0, 1.0)
        report = ode_residual_VI(family.aux_g(), family.envelope(), family.v_imag, np.linspace(-2, 2, 41))
        assert report.skipped == 1
        assert report.l_inf < ODE_TOL

    def test_gain_only(self):
        family = DarkSoliton(-1.3, 1.0)
        assert np.all(family.v_imag(np.linspace(-5, 5, 51)) > 0)


class TestRegistry:
    def test_build_from_mapping(self):
        family = family_from_mapping("GaussianLocalized", {"omega": 1.0, "a": 1.0})
        assert isinstance(family, GaussianLocalized)

    def test_airy_mu_optional(self):
        assert family_from_mapping("AiryFree", {"a": 1.0}).frame.mu == 0.0

    @pytest.mark.parametrize("tag,params", [
        ("Parabolic", {"a": 1.0}),
        ("DarkSoliton", {"sigma": 1.0, "a": 1.0, "omega": 2.0}),
        ("ConstIntensityInvHarm", {"V0": 1.0, "a": 1.0}),
    ])
    def test_rejects_bad_mapping(self, tag, params):
        """Unknown tags, unknown parameters and missing parameters are rejected"""
        with pytest.raises(ValidationError):
            family_from_mapping(tag, params)


class TestDescribe:
    def test_keys(self, gaussian):
        doc = describe(gaussian)
        for key in ("family", "params", "frame", "closed_forms", "branch", "validity_interval",
                    "pt_symmetric", "gain_loss", "notes"):
            assert key in doc
        assert doc["family"] == "GaussianLocalized"
        assert doc["gain_loss"]["character"] == "mixed"
        assert "nonlinear_shift" not in doc

    def test_constant_intensity_lists_shift(self):
        doc = describe(ConstIntensityInvHarm(1.0, 1.0, 0.25))
        assert doc["nonlinear_shift"]["c_shift"] == 1.0
        assert doc["gain_loss"]["character"] == "gain-only"

    def test_pt_symmetry_only_without_acceleration(self):
        """The inverted-oscillator potential is PT symmetric only for a = 0"""
        assert describe(ConstIntensityInvHarm(1.0, 0.0, 1.0))["pt_symmetric"] is True
        assert describe(ConstIntensityInvHarm(1.0, 1.0, 1.0))["pt_symmetric"] is False

    def test_characters(self):
        assert describe(DarkSoliton(1.0, 1.0))["gain_loss"]["character"] == "gain-only"
        assert describe(ConstIntensityPowerLaw(1.0, 2, 1.0))["gain_loss"]["character"] == "loss-only"
        assert describe(AiryFree(1.0))["gain_loss"]["character"] == "neutral"
