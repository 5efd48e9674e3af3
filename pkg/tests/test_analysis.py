import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from graphon_contracts import builtin, solve_continuum, step_graphon
from graphon_contracts.analysis import (
    HYPOTHESIS_FAILS, INAPPLICABLE, ORDERED, RateReport, check_influence_monotonicity, effort_convergence,
    fit_slope, gaussian_w2, stability_contracts, stability_effort, value_convergence,
)
from graphon_contracts.continuum import ContractLaw
from graphon_contracts.population import gaussian, point_mass, reservation

E = math.e
DELTA0 = point_mass(0.0)
R0 = reservation(0.0)
ZERO = builtin("constant", c=0.0)
SIZES = [8, 16, 32, 64, 128, 256, 512]


def law(m, v):
    return ContractLaw(m, v)


def test_w2_examples():
    assert gaussian_w2(law(0.5, 1), law(0.5, 1)) == 0.0
    assert gaussian_w2(law(0, 1), law(1, 4)) == pytest.approx(math.sqrt(2))
    assert gaussian_w2(law(0, 1), law(0, 4)) == 1.0


def test_w2_against_quantile_coupling():
    p = (np.arange(100_000) + 0.5) / 100_000
    qa, qb = stats.norm.ppf(p, 0, 1), stats.norm.ppf(p, 0, 2)
    numeric = math.sqrt(np.mean((qa - qb) ** 2))
    assert abs(gaussian_w2(law(0, 1), law(0, 4)) - numeric) <= 1e-3


def test_w2_rejects_negative_variance():
    with pytest.raises(ValueError):
        gaussian_w2(SimpleNamespace(mean=0.0, variance=-1.0), law(0, 1))


@settings(max_examples=60, deadline=None)
@given(*[st.tuples(st.floats(-5, 5), st.floats(0, 5)) for _ in range(3)])
def test_w2_metric(a, b, c):
    A, B, C = (law(m, v) for m, v in (a, b, c))
    assert gaussian_w2(A, A) == 0
    assert gaussian_w2(A, B) == gaussian_w2(B, A)
    assert gaussian_w2(A, C) <= gaussian_w2(A, B) + gaussian_w2(B, C) + 1e-12


def test_fit_slope_and_report():
    assert fit_slope([1, 2], [1.0, 0.5]) is None
    assert fit_slope([1, 2, 4], [1.0, 0.0, 0.25]) is None
    assert fit_slope([1, 2, 4], [1.0, 0.5, 0.25]) == pytest.approx(-1.0)
    r = RateReport.build([10, 20, 40, 80], [0.1, 0.05, 0.025, 0.0125])
    assert r.constant_estimates == pytest.approx((1.0, 1.0, 1.0, 1.0))
    assert r.constant_spread() == pytest.approx(1.0)
    assert r.rows()[-1][3] == pytest.approx(-1.0)
    assert RateReport.build([4, 16, 64], [0.5, 0.25, 0.125], order=0.5).constant_estimates == pytest.approx((1, 1, 1))
    with pytest.raises(ValueError):
        RateReport.build([20, 10], [1.0, 1.0])
    with pytest.raises(ValueError):
        RateReport.build([10, 20], [1.0, np.nan])


def test_effort_convergence_zero_graphon():
    r = effort_convergence(ZERO, 1.0, [8, 16, 32], M=16)
    assert r.errors == (0.0, 0.0, 0.0)
    assert r.fitted_slope is None


def test_effort_convergence_aligned_step_graphon():
    G = step_graphon([0.25, 0.5], [[1.0, 2.0, 0.5], [0.0, 1.5, 1.0], [2.0, 0.3, 1.2]])
    r = effort_convergence(G, 1.0, [4, 8, 16, 32], M=64)
    assert max(r.errors) <= 1e-12


def test_effort_convergence_rejects_coarse_reference():
    with pytest.raises(ValueError):
        effort_convergence(builtin("G2"), 1.0, [8, 16], K=32)
    with pytest.raises(ValueError):
        effort_convergence(builtin("G2"), 1.0, [8])


@pytest.fixture(scope="module")
def logistic_effort_report():
    return effort_convergence(builtin("G2"), 1.0, SIZES)


def test_effort_convergence_logistic(logistic_effort_report):
    r = logistic_effort_report
    assert -1.2 <= r.fitted_slope <= -0.8
    assert r.constant_spread() <= 2.5
    inversions = sum(b > a for a, b in zip(r.errors, r.errors[1:]))
    assert inversions <= 1
    # the reference's own error sits a decade below the smallest measured error
    assert r.extras["reference_error"] <= 0.1 * min(r.errors)


def test_value_convergence_zero_graphon():
    mse, w2 = value_convergence(ZERO, DELTA0, R0, 1.0, [4, 8, 16], replications=30, M=16)
    assert max(mse.errors) <= 1e-16
    assert max(w2.errors) == 0.0


def test_value_convergence_needs_replications():
    with pytest.raises(ValueError):
        value_convergence(ZERO, DELTA0, R0, 1.0, [4, 8], replications=10)


@pytest.fixture(scope="module")
def logistic_value_reports():
    return value_convergence(builtin("G2"), DELTA0, R0, 1.0, SIZES[1:], replications=30, seed=0)


def test_value_convergence_point_mass(logistic_value_reports):
    mse, _ = logistic_value_reports
    assert mse.fitted_slope <= -0.9


def test_value_convergence_gaussian_initials():
    mse, _ = value_convergence(builtin("G2"), gaussian(0.0, 1.0), R0, 1.0, SIZES[1:], replications=30, seed=0)
    assert -1.3 <= mse.fitted_slope <= -0.7
    assert mse.constant_spread() <= 2.5


def test_contract_w2_within_root_n_bound(logistic_value_reports):
    _, w2 = logistic_value_reports
    assert w2.fitted_slope <= -0.3
    # sqrt(N) * W2 does not grow past its value at the smallest size
    assert max(w2.constant_estimates) <= w2.constant_estimates[0]


def test_contract_w2_slope_band(logistic_value_reports):
    _, w2 = logistic_value_reports
    assert -0.7 <= w2.fitted_slope <= -0.3


def test_stability_identical():
    G = builtin("G2")
    r = stability_effort(G, G, 1.0, 64, 64, 64)
    assert r.sup_Q_diff == 0.0 and r.sup_G_diff == 0.0 and math.isnan(r.ratio)
    w2, shape = stability_contracts(G, G, R0, 0.3, 1.0, 64, 64, 64)
    assert w2 == 0.0 and shape == 0.0


def test_stability_constant_perturbation():
    r = stability_effort(builtin("constant", c=1.0), builtin("constant", c=1.01), 1.0, 256, 16)
    assert r.sup_Q_diff == pytest.approx(E * (math.exp(0.01) - 1), rel=1e-6)
    assert r.sup_G_diff == pytest.approx(0.01)
    assert r.ratio == pytest.approx(2.73, abs=0.01)


def test_stability_logistic_local_lipschitz():
    G = builtin("logistic", theta=10.0)
    ratios = [stability_effort(G, builtin("logistic", theta=10.0 + 0.5 * s), 1.0, 128, 128, 512).ratio
              for s in (1.0, 0.1, 0.01)]
    assert max(ratios) / min(ratios) <= 2.0


def _analytic_law(g):
    var = (math.exp(2 * g) - 1) / (2 * g)
    return law(0.5 * var, var)


def test_stability_contracts_constant_closed_form():
    w2, shape = stability_contracts(builtin("constant", c=1.0), builtin("constant", c=1.01), R0, 0.4,
                                    1.0, 1024, 16)
    assert abs(w2 - gaussian_w2(_analytic_law(1.0), _analytic_law(1.01))) <= 1e-6
    assert shape == pytest.approx(math.sqrt(0.01) + 0.01)


def test_stability_contracts_scaling():
    G = builtin("constant", c=1.0)
    w = [stability_contracts(G, builtin("constant", c=1.0 + e), R0, 0.5, 1.0, 256, 16) for e in (0.04, 0.01)]
    w2_ratio, shape_ratio = w[0][0] / w[1][0], w[0][1] / w[1][1]
    assert w2_ratio <= 2 * shape_ratio


def test_stability_shared_grid_for_different_blocks():
    A = step_graphon([0.3], [[1, 0], [0, 1]])
    B = step_graphon([0.6], [[1, 0], [0, 1]])
    r = stability_effort(A, B, 1.0, 64, 64, 64)
    assert r.sup_G_diff == 1.0 and r.sup_Q_diff > 0


def test_monotonicity_separable_profile():
    G = builtin("column-separable", profile={"breaks": [0.5], "values": [0.5, 1.0]})
    Q = solve_continuum(G, 1.0, 256, 256)
    v = check_influence_monotonicity(G, 0.25, 0.75, Q)
    assert v.verdict == ORDERED and not v.equal
    # type average decays at rate 0.75: Q(0,u) = 1 + Ghat(u) (e^{0.75} - 1)/0.75
    q1, q2 = (1 + g * math.expm1(0.75) / 0.75 for g in (0.5, 1.0))
    assert Q.at(0.0, 0.25) == pytest.approx(q1, abs=1e-6)
    assert Q.at(0.0, 0.75) == pytest.approx(q2, abs=1e-6)
    assert check_influence_monotonicity(G, 0.75, 0.25, Q).verdict == HYPOTHESIS_FAILS


def test_monotonicity_same_type():
    G = builtin("G1")
    Q = solve_continuum(G, 1.0, 32, 32)
    v = check_influence_monotonicity(G, 0.4, 0.4, Q)
    assert v.verdict == ORDERED and v.equal


def test_monotonicity_negative_graphon():
    G = builtin("constant", c=-0.5)
    Q = solve_continuum(G, 1.0, 16, 16)
    assert check_influence_monotonicity(G, 0.1, 0.9, Q).verdict == INAPPLICABLE


def test_monotonicity_domain():
    Q = solve_continuum(ZERO, 1.0, 4, 4)
    with pytest.raises(ValueError):
        check_influence_monotonicity(ZERO, -0.1, 0.5, Q)


def test_monotonicity_random_sorted_step_graphons():
    rng = np.random.default_rng(2024)
    for _ in range(20):
        m = int(rng.integers(1, 6))
        breaks = np.sort(rng.choice(np.arange(1, 20), m - 1, replace=False)) / 20
        blocks = np.sort(rng.uniform(0, 3, (m, m)), axis=1)  # columns increase with the influencer's block
        G = step_graphon(breaks, blocks)
        Q = solve_continuum(G, 1.0, 64, 64)
        u1, u2 = np.sort(rng.uniform(0, 1, 2))
        v = check_influence_monotonicity(G, u1, u2, Q, mesh=128)
        assert v.verdict == ORDERED
