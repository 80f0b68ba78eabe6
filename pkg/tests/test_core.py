import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from dcrm.core import (
    DcrmScenario,
    analytic_mean,
    analytic_variance,
    empirical_mgf,
    martingale_residual_mean,
    martingale_residual_variance,
    mgf_exponential_closed,
    mgf_nhpp,
    simulate_discounted_loss,
)
from dcrm.distributions import Deterministic, Exponential, Gamma, MgfDomainError
from dcrm.mileage import AlternatingRenewal, ConstantSpeed
from dcrm.processes import ConstantIntensity, MileageAffineIntensity, PiecewiseIntensity


def scenario(rate=1.0, delta=0.05, horizon=1.0, claim=None, **kw):
    return DcrmScenario(claim=claim or Exponential(1.0),
                        counting=ConstantIntensity(rate),
                        delta=delta, horizon=horizon, **kw)


def discounted_mean_oracle(mu1, rate, delta, horizon):
    # independent route to the expected discounted loss: mu1 * rate * the
    # discount integral, evaluated by adaptive quadrature
    integral, _ = integrate.quad(lambda s: np.exp(-delta * s), 0.0, horizon)
    return mu1 * rate * integral


class TestScenario:
    def test_rejects_bad_delta_and_horizon(self):
        with pytest.raises(ValueError):
            scenario(delta=-0.1)
        with pytest.raises(ValueError):
            scenario(horizon=0.0)

    def test_mileage_pairing_enforced(self):
        with pytest.raises(ValueError):
            DcrmScenario(claim=Exponential(1.0),
                         counting=MileageAffineIntensity(0.1, 0.01),
                         delta=0.0, horizon=1.0)
        with pytest.raises(ValueError):
            scenario(mileage=ConstantSpeed(30.0))


class TestSimulate:
    def test_zero_rate_gives_zero_loss(self):
        result = simulate_discounted_loss(scenario(rate=0.0), 5_000, 1)
        assert np.all(result.z == 0.0)
        assert np.all(result.counts == 0)

    def test_zero_count_paths_have_exactly_zero_loss(self):
        result = simulate_discounted_loss(scenario(), 20_000, 2)
        assert np.all(result.z[result.counts == 0] == 0.0)
        assert np.all(result.z >= 0.0)

    def test_extreme_discounting_kills_the_mean(self):
        result = simulate_discounted_loss(scenario(delta=1e4), 10_000, 3)
        assert result.mean() < 1e-3

    def test_mean_within_four_se_of_closed_form(self):
        result = simulate_discounted_loss(scenario(), 100_000, 4)
        target = analytic_mean(1.0, 1.0, 0.05, 1.0)
        assert abs(result.mean() - target) < 4.0 * result.mean_stderr()

    def test_variance_within_four_se_of_closed_form(self):
        result = simulate_discounted_loss(scenario(rate=2.0, delta=0.1, horizon=5.0), 100_000, 5)
        target = analytic_variance(2.0, 2.0, 0.1, 5.0)
        assert abs(result.variance() - target) < 4.0 * result.variance_stderr()

    def test_same_seed_bitwise_identical(self):
        a = simulate_discounted_loss(scenario(), 10_000, 11, full_trace=True)
        b = simulate_discounted_loss(scenario(), 10_000, 11, full_trace=True)
        assert np.array_equal(a.z, b.z)
        assert np.array_equal(a.counts, b.counts)
        assert np.array_equal(a.trace.times, b.trace.times)
        assert np.array_equal(a.trace.claims, b.trace.claims)

    def test_thread_count_does_not_change_results(self):
        one = simulate_discounted_loss(scenario(), 30_000, 12, full_trace=True)
        four = simulate_discounted_loss(scenario(), 30_000, 12, full_trace=True,
                                        n_threads=4)
        assert np.array_equal(one.z, four.z)
        assert np.array_equal(one.trace.path_index, four.trace.path_index)
        assert np.array_equal(one.trace.times, four.trace.times)

    def test_piecewise_intensity_mean(self):
        counting = PiecewiseIntensity([0.0, 1.0], [2.0, 0.5])
        sc = DcrmScenario(claim=Deterministic(1.0), counting=counting,
                          delta=0.0, horizon=2.0)
        result = simulate_discounted_loss(sc, 100_000, 6)
        # with unit deterministic claims and no discounting, Z is the count
        assert abs(result.mean() - 2.5) < 4.0 * result.mean_stderr()

    def test_callable_intensity_mean(self):
        from dcrm.processes import CallableIntensity

        counting = CallableIntensity(lambda s: 0.5 * s, max_rate=1.0)
        sc = DcrmScenario(claim=Deterministic(1.0), counting=counting,
                          delta=0.0, horizon=2.0)
        expected, _ = integrate.quad(lambda s: 0.5 * s, 0.0, 2.0)
        result = simulate_discounted_loss(sc, 50_000, 26)
        assert abs(result.mean() - expected) < 4.0 * result.mean_stderr()

    def test_cox_scenario_runs_and_prices_sensibly(self):
        sc = DcrmScenario(claim=Exponential(1.0),
                          counting=MileageAffineIntensity(0.1, 0.005),
                          delta=0.05, horizon=5.0,
                          mileage=AlternatingRenewal(1.0, 1.0, 30.0))
        result = simulate_discounted_loss(sc, 20_000, 7, full_trace=True)
        assert np.all(result.z[result.counts == 0] == 0.0)
        assert result.trace is not None
        # trace reproduces the stored totals
        assert np.allclose(result.z_at(5.0), result.z, rtol=1e-12, atol=1e-15)

    def test_trace_consistency_at_horizon(self):
        result = simulate_discounted_loss(scenario(), 20_000, 8, full_trace=True)
        assert np.allclose(result.z_at(1.0), result.z, rtol=1e-12, atol=1e-15)
        assert np.all(result.z_at(0.0) == 0.0)

    def test_z_at_requires_trace(self):
        result = simulate_discounted_loss(scenario(), 100, 9)
        with pytest.raises(ValueError, match="full_trace"):
            result.z_at(0.5)

    def test_csv_round_trip(self, tmp_path):
        result = simulate_discounted_loss(scenario(), 50, 10)
        out = tmp_path / "paths.csv"
        result.to_csv(out)
        lines = out.read_text().splitlines()
        assert lines[0] == "path,z,count"
        assert len(lines) == 51
        first = lines[1].split(",")
        assert first[0] == "0"
        assert float(first[1]) == pytest.approx(result.z[0], rel=1e-9)

        summary = tmp_path / "summary.csv"
        result.summary_to_csv(summary)
        rows = summary.read_text().splitlines()
        assert rows[0] == "stat,value,stderr"
        stats = {r.split(",")[0] for r in rows[1:]}
        assert {"mean", "variance", "analytic_mean", "analytic_variance"} <= stats


class TestAnalyticMean:
    def test_matches_quadrature_oracle(self):
        assert analytic_mean(1.0, 1.0, 0.05, 1.0) == pytest.approx(
            discounted_mean_oracle(1.0, 1.0, 0.05, 1.0), rel=1e-10)
        # frozen value from the oracle
        assert analytic_mean(1.0, 1.0, 0.05, 1.0) == pytest.approx(0.9754115100, rel=1e-9)

    def test_zero_horizon(self):
        assert analytic_mean(1.0, 1.0, 0.05, 0.0) == 0.0

    def test_zero_delta_limit_branch(self):
        assert analytic_mean(2.0, 3.0, 0.0, 4.0) == 24.0

    def test_continuous_at_zero_delta(self):
        exact = 2.0 * 3.0 * 4.0
        assert abs(analytic_mean(2.0, 3.0, 1e-10, 4.0) - exact) < 1e-6 * exact

    def test_perpetuity_limit(self):
        mu1, rate, delta = 1.5, 2.0, 0.04
        perpetuity = mu1 * rate / delta
        value = analytic_mean(mu1, rate, delta, 1e3 / delta)
        assert abs(value - perpetuity) < 1e-6 * perpetuity


class TestAnalyticVariance:
    def test_matches_quadrature_oracle(self):
        integral, _ = integrate.quad(lambda s: np.exp(-2 * 0.1 * s), 0.0, 5.0)
        oracle = 2.0 * 2.0 * integral
        assert analytic_variance(2.0, 2.0, 0.1, 5.0) == pytest.approx(oracle, rel=1e-10)
        assert analytic_variance(2.0, 2.0, 0.1, 5.0) == pytest.approx(12.64241118, rel=1e-9)

    def test_zero_horizon(self):
        assert analytic_variance(2.0, 2.0, 0.1, 0.0) == 0.0

    def test_zero_delta_limit_branch(self):
        assert analytic_variance(2.0, 1.0, 0.0, 3.0) == 6.0


class TestMgfNhpp:
    def test_unit_at_zero_argument(self):
        assert mgf_nhpp(Exponential(1.0), 1.0, 1.0, 1.0, 0.0) == 1.0
        assert mgf_nhpp(Gamma(2.0, 0.5), 2.0, 0.3, 2.0, 0.0) == 1.0

    def test_unit_at_zero_rate(self):
        assert mgf_nhpp(Exponential(1.0), 0.0, 1.0, 1.0, 0.5) == 1.0

    def test_matches_exponential_closed_form(self):
        quadrature = mgf_nhpp(Exponential(1.0), 1.0, 1.0, 1.0, 0.5)
        closed = mgf_exponential_closed(1.0, 1.0, 1.0, 1.0, 0.5)
        assert quadrature == pytest.approx(closed, rel=1e-10)
        assert closed == pytest.approx(1.6321205588, rel=1e-9)

    def test_zero_delta_equals_compound_poisson_form(self):
        # with no discounting the m.g.f. is exp(rate*t*(M_X(u) - 1))
        for claim, u in [(Exponential(2.0), 0.2), (Gamma(2.0, 0.5), 0.8),
                         (Deterministic(1.5), 0.6)]:
            rate, t = 1.3, 2.0
            expected = np.exp(rate * t * (claim.mgf(u) - 1.0))
            assert mgf_nhpp(claim, rate, 0.0, t, u) == pytest.approx(expected, rel=1e-10)

    def test_piecewise_single_segment_matches_constant_route(self):
        # Gauss-Legendre segment integration against adaptive quadrature
        claim = Exponential(1.0)
        pw = PiecewiseIntensity([0.0], [0.7])
        for u in (0.2, 0.5, -1.0):
            assert mgf_nhpp(claim, pw, 0.4, 3.0, u) == pytest.approx(
                mgf_nhpp(claim, 0.7, 0.4, 3.0, u), rel=1e-12)

    def test_domain_error(self):
        with pytest.raises(MgfDomainError):
            mgf_nhpp(Exponential(1.0), 1.0, 1.0, 1.0, 1.0)

    def test_first_derivative_matches_analytic_mean(self):
        claim, rate, delta, t = Exponential(1.0), 1.0, 0.05, 1.0
        h = 1e-6
        derivative = (mgf_nhpp(claim, rate, delta, t, h)
                      - mgf_nhpp(claim, rate, delta, t, -h)) / (2 * h)
        assert derivative == pytest.approx(
            analytic_mean(claim.mean, rate, delta, t), rel=1e-4)

    def test_log_second_difference_matches_analytic_variance(self):
        claim, rate, delta, t = Exponential(1.0), 1.0, 0.05, 1.0
        h = 1e-4
        logs = [np.log(mgf_nhpp(claim, rate, delta, t, u)) for u in (h, -h)]
        second = (logs[0] + logs[1]) / h**2
        assert second == pytest.approx(
            analytic_variance(claim.second_moment, rate, delta, t), rel=1e-3)


class TestMgfExponentialClosed:
    def test_unit_at_zero(self):
        assert mgf_exponential_closed(1.0, 1.0, 1.0, 1.0, 0.0) == 1.0

    def test_domain_error_at_boundary(self):
        with pytest.raises(MgfDomainError):
            mgf_exponential_closed(2.0, 1.0, 1.0, 1.0, 0.5)

    def test_small_delta_approaches_undiscounted_form(self):
        undiscounted = np.exp(0.5 / 0.5)  # rate*t*u*beta/(1-u*beta)
        value = mgf_exponential_closed(1.0, 1.0, 1e-8, 1.0, 0.5)
        assert abs(value - undiscounted) < 1e-6 * undiscounted

    def test_zero_delta_routes_to_limit_form(self):
        assert mgf_exponential_closed(1.0, 1.0, 0.0, 1.0, 0.5) == pytest.approx(
            np.exp(1.0), rel=1e-14)

    def test_long_horizon_approaches_perpetuity_form(self):
        beta, rate, delta, u = 1.0, 1.0, 1.0, 0.3
        perpetuity = (1.0 - u * beta) ** (-rate / delta)
        value = mgf_exponential_closed(beta, rate, delta, 1e3 / delta, u)
        assert abs(value - perpetuity) < 1e-6 * perpetuity


class TestMartingaleResiduals:
    def test_zero_rate_residuals_are_exactly_zero(self):
        result = simulate_discounted_loss(scenario(rate=0.0), 1_000, 13, full_trace=True)
        res = martingale_residual_mean(result, [0.5, 1.0])
        assert np.all(res.means == 0.0)
        assert np.all(res.z_scores() == 0.0)

    def test_mean_residuals_centered(self):
        result = simulate_discounted_loss(scenario(), 100_000, 14, full_trace=True)
        res = martingale_residual_mean(result, [0.25, 0.5, 1.0])
        assert np.all(np.abs(res.z_scores()) < 4.0)

    def test_variance_residuals_centered(self):
        result = simulate_discounted_loss(scenario(), 100_000, 15, full_trace=True)
        res = martingale_residual_variance(result, [0.5, 1.0])
        assert np.all(np.abs(res.z_scores()) < 4.0)

    def test_deterministic_claims_undiscounted(self):
        sc = scenario(delta=0.0, claim=Deterministic(2.0))
        result = simulate_discounted_loss(sc, 50_000, 16, full_trace=True)
        res_a = martingale_residual_mean(result, [1.0])
        assert abs(res_a.z_scores()[0]) < 4.0
        # with delta=0 the variance residual is (Z - mu1*rate*t)^2 - mu2*rate*t
        res_b = martingale_residual_variance(result, [1.0])
        direct = (result.z_at(1.0) - 2.0 * 1.0 * 1.0) ** 2 - 4.0 * 1.0 * 1.0
        assert res_b.means[0] == pytest.approx(direct.mean(), rel=1e-12)
        assert abs(res_b.z_scores()[0]) < 4.0

    def test_grid_validation(self):
        result = simulate_discounted_loss(scenario(), 100, 17, full_trace=True)
        with pytest.raises(ValueError):
            martingale_residual_mean(result, [0.5, 1.5])
        with pytest.raises(ValueError):
            martingale_residual_mean(result, [])

    def test_requires_constant_rate(self):
        sc = DcrmScenario(claim=Exponential(1.0),
                          counting=PiecewiseIntensity([0.0], [1.0]),
                          delta=0.0, horizon=1.0)
        result = simulate_discounted_loss(sc, 100, 18, full_trace=True)
        with pytest.raises(ValueError, match="constant"):
            martingale_residual_mean(result, [0.5])


class TestEmpiricalMgf:
    def test_exact_at_zero(self):
        result = simulate_discounted_loss(scenario(), 1_000, 19)
        assert empirical_mgf(result, 0.0) == (1.0, 0.0)

    def test_exact_at_zero_rate(self):
        result = simulate_discounted_loss(scenario(rate=0.0), 1_000, 20)
        assert empirical_mgf(result, 0.3) == (1.0, 0.0)

    def test_guard_at_half_the_boundary(self):
        result = simulate_discounted_loss(scenario(), 100, 21)
        with pytest.raises(MgfDomainError):
            empirical_mgf(result, 0.51)
        empirical_mgf(result, 0.5)  # at the guard is allowed

    def test_matches_closed_form(self):
        result = simulate_discounted_loss(scenario(delta=1.0), 100_000, 22)
        estimate, stderr = empirical_mgf(result, 0.4)
        target = mgf_exponential_closed(1.0, 1.0, 1.0, 1.0, 0.4)
        assert abs(estimate - target) < 4.0 * stderr


@settings(max_examples=80)
@given(mu1=st.floats(0.01, 10.0), rate=st.floats(0.0, 5.0),
       delta=st.floats(0.0, 3.0),
       t1=st.floats(0.0, 10.0), t2=st.floats(0.0, 10.0))
def test_analytic_mean_monotone_in_horizon(mu1, rate, delta, t1, t2):
    lo, hi = sorted((t1, t2))
    assert analytic_mean(mu1, rate, delta, lo) <= analytic_mean(mu1, rate, delta, hi) + 1e-12


@settings(max_examples=80)
@given(mu1=st.floats(0.01, 10.0), rate=st.floats(0.01, 5.0),
       delta=st.floats(0.001, 3.0), t=st.floats(0.0, 50.0))
def test_analytic_mean_below_perpetuity(mu1, rate, delta, t):
    assert analytic_mean(mu1, rate, delta, t) <= mu1 * rate / delta * (1 + 1e-12)
