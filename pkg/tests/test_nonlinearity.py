import numpy as np
import pytest

import latticegap as lg
from latticegap.errors import InvalidInputError
from latticegap.nonlinearity import CustomNonlinearity, check_primitive


@pytest.fixture
def power4():
    return lg.PowerNonlinearity(4.0)


def linear_model():
    return CustomNonlinearity(
        f_fn=lambda u: u, F_fn=lambda u: u ** 2 / 2.0, df_fn=lambda u: np.ones_like(u),
        growth_a=1.0, growth_p=3.0, gap_b=None, gap_q=None)


def saturating_model():
    # f = u^3 / (1 + u^2): superlinear near 0 but F grows like u^2/2
    return CustomNonlinearity(
        f_fn=lambda u: u ** 3 / (1.0 + u ** 2),
        F_fn=lambda u: 0.5 * u ** 2 - 0.5 * np.log1p(u ** 2),
        growth_a=1.0, growth_p=4.0, gap_b=None, gap_q=None)


class TestEvaluate:
    def test_power4_point_values(self, power4):
        f, F, df = lg.evaluate(power4, (0, 0, 0), 2.0)
        assert (f, F, df) == (8.0, 4.0, 12.0)

    def test_zero(self, power4):
        f, F, df = lg.evaluate(power4, None, 0.0)
        assert (f, F) == (0.0, 0.0)

    def test_odd_f_even_F(self, power4):
        f, F, _ = lg.evaluate(power4, None, -2.0)
        assert (f, F) == (-8.0, 4.0)

    def test_nonfinite_rejected(self, power4):
        with pytest.raises(InvalidInputError):
            lg.evaluate(power4, None, np.nan)

    def test_exponent_validated(self):
        with pytest.raises(InvalidInputError):
            lg.PowerNonlinearity(2.0)


class TestConsistency:
    def test_primitive_matches_quadrature(self, power4):
        us = np.array([-3.0, -1.2, -0.1, 0.2, 1.0, 2.5])
        assert check_primitive(power4, us, panels=10000) <= 1e-8

    def test_quadrature_fallback_for_missing_primitive(self):
        model = CustomNonlinearity(f_fn=lambda u: u ** 3)
        us = np.array([-2.0, 0.5, 1.5])
        np.testing.assert_allclose(model.F(us), us ** 4 / 4.0, atol=1e-10)

    def test_df_matches_finite_differences(self, power4):
        h = 1e-5
        rng = np.random.default_rng(0)
        us = np.concatenate([rng.uniform(0.2, 4.0, 40), rng.uniform(-4.0, -0.2, 40)])
        fd = (power4.f(us + h) - power4.f(us - h)) / (2 * h)
        assert np.max(np.abs(power4.df(us) - fd)) <= 1e-6

    def test_sign_identity_pointwise(self, power4):
        us = np.linspace(-10, 10, 2001)
        fs, Fs = power4.f(us), power4.F(us)
        assert np.all(fs * us >= 2 * Fs - 1e-12)
        assert np.all(Fs >= 0)

    def test_power_gap_constants(self):
        # f u - 2F = (1 - 2/p) |u|^p
        for p in (2.5, 3.0, 4.0, 6.0):
            model = lg.PowerNonlinearity(p)
            us = np.linspace(-5, 5, 101)
            gap = model.f(us) * us - 2 * model.F(us)
            np.testing.assert_allclose(gap, (1 - 2 / p) * np.abs(us) ** p, atol=1e-12)
            assert model.gap_b == (p - 2) / p and model.gap_q == p


class TestValidator:
    def test_power4_passes_everything(self, power4):
        report = lg.validate_hypotheses(power4)
        assert report.all_passed, report.failed_names()
        assert set(report.checks) == {
            "periodicity", "growth_envelope", "vanishing_at_zero",
            "superquadratic_growth", "monotone_slope", "superquadratic_gap",
            "sign_condition"}

    def test_linear_fails_zero_slope_and_growth(self):
        report = lg.validate_hypotheses(linear_model())
        failed = report.failed_names()
        assert "vanishing_at_zero" in failed
        assert "superquadratic_growth" in failed

    def test_saturating_fails_superquadratic_growth(self):
        report = lg.validate_hypotheses(saturating_model())
        assert "superquadratic_growth" in report.failed_names()
        assert report.checks["vanishing_at_zero"].passed

    def test_zero_model_fails(self):
        report = lg.validate_hypotheses(lg.ZeroNonlinearity())
        assert not report.all_passed

    def test_grid_preconditions(self, power4):
        with pytest.raises(InvalidInputError):
            lg.validate_hypotheses(power4, u_max=5.0)
        with pytest.raises(InvalidInputError):
            lg.validate_hypotheses(power4, n_points=100)

    def test_report_serializable(self, power4):
        report = lg.validate_hypotheses(power4)
        data = report.to_dict()
        assert data["all_passed"] is True
        assert all({"name", "passed", "worst_violation", "worst_u", "detail"}
                   <= set(c) for c in data["checks"].values())
