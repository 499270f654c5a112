import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from suslab import gf_analytics as gf
from suslab.degree_model import Criticality, DegreeDistribution, classify
from suslab.harness import lambda_family


def _law(weights):
    return DegreeDistribution.explicit(weights, normalize=True)


laws = st.dictionaries(st.integers(0, 8), st.floats(0.02, 1.0), min_size=2, max_size=5).filter(
    lambda m: any(k > 0 for k in m)
)


def _kappa_oracle(dist):
    """Smallest root in [0, 1] of the polynomial g'(s) - mu s, from its companion matrix."""
    p = [Fraction(x) for x in dist.p]
    coeffs = [float((k + 1) * p[k + 1]) for k in range(len(p) - 1)]  # g' ascending
    coeffs += [0.0] * 2
    coeffs[1] -= float(sum(k * pk for k, pk in enumerate(p)))
    roots = np.roots(coeffs[::-1])
    real = sorted(r.real for r in roots if abs(r.imag) < 1e-9 and -1e-9 <= r.real <= 1 + 1e-9)
    return max(0.0, real[0]) if real else 1.0


def test_pgf_examples(p13):
    assert gf.pgf(p13, 1 / 3, 1) == pytest.approx(2 / 3, abs=1e-15)
    assert gf.pgf(p13, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert gf.pgf(p13, 1 / 3, 2) == pytest.approx(1.0, abs=1e-15)
    assert gf.pgf(p13, 0.0) == 0.0
    with pytest.raises(ValueError):
        gf.pgf(p13, 1.5)


def test_solve_kappa_examples(p13, p13_sub):
    assert gf.solve_kappa(p13_sub) == 1.0
    assert gf.solve_kappa(p13) == pytest.approx(1 / 3, abs=1e-12)
    assert gf.solve_kappa(_law({0: 1, 3: 1})) == 0.0


def test_survival_examples(p13, p13_sub):
    assert gf.survival(p13_sub) == 0.0
    assert gf.survival(p13) == pytest.approx(22 / 27, abs=1e-12)
    assert gf.survival(_law({0: 1, 3: 1})) == pytest.approx(0.5)


def test_chi_general_examples(p13_sub, matching):
    spec = gf.BranchingSpec.for_graph(p13_sub)
    assert gf.chi_general(spec) == pytest.approx(10.8, rel=1e-12)
    crit = gf.BranchingSpec.for_graph(_law({1: 3, 3: 1}))
    assert gf.chi_general(crit) == math.inf
    assert gf.chi_general(gf.BranchingSpec.for_graph(matching)) == 2.0


def test_chi_hat_general_examples(p13, p13_sub):
    assert gf.chi_hat_general(gf.BranchingSpec.for_graph(p13_sub)) == pytest.approx(10.8, rel=1e-12)
    assert gf.chi_hat_general(gf.BranchingSpec.for_graph(p13)) == pytest.approx(17 / 27, rel=1e-10)
    root = DegreeDistribution.explicit({0: 0.3, 2: 0.7})
    one = DegreeDistribution.explicit({1: 1.0})
    assert gf.chi_hat_general(gf.BranchingSpec(root, one)) == pytest.approx(0.3)


def test_graph_limit_examples(p13, p13_sub, p13_crit, matching):
    assert gf.chi_graph_limit(p13_sub) == pytest.approx(10.8, rel=1e-12)
    assert gf.chi_graph_limit(p13_crit) == math.inf
    assert gf.chi_graph_limit(matching) == 2.0
    assert gf.chi_hat_graph_limit(p13) == pytest.approx(17 / 27, rel=1e-10)
    assert gf.chi_hat_graph_limit(p13_sub) == gf.chi_graph_limit(p13_sub)
    assert gf.chi_hat_graph_limit(matching) == 2.0
    assert gf.chi_hat_graph_limit(p13_crit) == math.inf


def test_dual_examples(p13, p13_sub):
    dual = gf.dual_distribution(p13)
    assert dual[1] == pytest.approx(0.9, abs=1e-12) and dual[3] == pytest.approx(0.1, abs=1e-12)
    assert gf.dual_distribution(p13_sub) is p13_sub
    mu_hat, nu_hat = gf.dual_moments(p13)
    assert (mu_hat, nu_hat) == pytest.approx((1.2, 0.6), abs=1e-12)
    assert (dual.mu, dual.nu) == pytest.approx((1.2, 0.6), abs=1e-12)


def test_finite_n_prediction_examples():
    assert gf.finite_n_prediction(1.4, 1.2) == pytest.approx(10.8)
    assert gf.finite_n_prediction(2, 3) == math.inf
    assert gf.finite_n_prediction(0, 0) == 1.0


def test_delta_metric_examples():
    assert gf.delta_metric(2, math.inf) == 0.5
    assert gf.delta_metric(7.0, 7.0) == 0.0
    assert gf.delta_metric(10.8, 12) == pytest.approx(abs(1 / 10.8 - 1 / 12))
    assert gf.delta_metric(1, math.inf) == 1.0
    with pytest.raises(ValueError):
        gf.delta_metric(0.5, 2)


@given(x=st.floats(1, 1e6) | st.just(math.inf), y=st.floats(1, 1e6) | st.just(math.inf))
def test_delta_metric_properties(x, y):
    d = gf.delta_metric(x, y)
    assert 0 <= d <= 1 and d == gf.delta_metric(y, x)


def test_report_examples(p13, p13_sub, p13_crit):
    r = gf.analytics_report(p13)
    assert r.kappa == pytest.approx(1 / 3) and r.rho_inf == pytest.approx(22 / 27)
    assert r.chi_inf == math.inf and r.chi_hat_inf == pytest.approx(17 / 27)
    d = gf.analytics_report(p13_sub).to_dict()
    assert d["chi_inf"] == pytest.approx(10.8) and d["chi_hat_inf"] == pytest.approx(10.8)
    c = gf.analytics_report(p13_crit)
    assert c.chi_inf == math.inf and c.chi_hat_inf == math.inf and "critical" in c.flags


def test_numerically_critical_flag():
    eps = 1e-10
    # p1 = 3/4 + e, p3 = 1/4 - e gives mu - nu = 4e
    d = DegreeDistribution.explicit({1: 0.75 + eps, 3: 0.25 - eps})
    r = gf.analytics_report(d)
    assert "numerically critical" in r.flags and r.chi_inf == math.inf


@settings(max_examples=150, deadline=None)
@given(w=laws)
def test_kappa_fixed_point_and_oracle(w):
    dist = _law(w)
    assume(abs(dist.nu - dist.mu) > 1e-3)
    kappa = gf.solve_kappa(dist)
    assert 0.0 <= kappa <= 1.0
    assert abs(gf.pgf(dist, kappa, 1) - dist.mu * kappa) <= 1e-10
    assert kappa == pytest.approx(_kappa_oracle(dist), abs=1e-7)


@settings(max_examples=150, deadline=None)
@given(w=laws)
def test_supercritical_identities(w):
    dist = _law(w)
    assume(dist.nu - dist.mu > 1e-3 and dist[0] + dist[1] > 1e-3)
    kappa = gf.solve_kappa(dist)
    assume(kappa > 1e-6)
    chi_hat = gf.chi_hat_graph_limit(dist)
    via_kappa, via_mu = gf._chi_hat_forms(dist, kappa)
    assert via_kappa == pytest.approx(via_mu, rel=1e-9, abs=1e-9)
    mu_hat, nu_hat = gf.dual_moments(dist)
    assert nu_hat < mu_hat
    assert chi_hat == pytest.approx(
        gf.pgf(dist, kappa) * gf.finite_n_prediction(mu_hat, nu_hat), rel=1e-9, abs=1e-9
    )
    assert chi_hat == pytest.approx(gf.chi_hat_general(gf.BranchingSpec.for_graph(dist)), rel=1e-9)
    dual = gf.dual_distribution(dist)
    assert classify(dual.mu, dual.nu) is Criticality.SUBCRITICAL
    gk = gf.pgf(dist, kappa)
    for x in (0.0, 0.3, 0.7, 1.0):
        assert gf.pgf(dual, x) == pytest.approx(gf.pgf(dist, kappa * x) / gk, abs=1e-10)


low_degree_laws = st.dictionaries(st.integers(0, 3), st.floats(0.02, 1.0), min_size=2, max_size=4).filter(
    lambda m: 1 in m
)


@settings(max_examples=100, deadline=None)
@given(w=low_degree_laws)
def test_subcritical_reduction(w):
    dist = _law(w)
    assume(dist.mu - dist.nu > 1e-3)
    assert gf.solve_kappa(dist) == 1.0
    assert gf.chi_hat_graph_limit(dist) == gf.chi_graph_limit(dist)
    assert gf.survival(dist) == 0.0


def test_kappa_nonincreasing_along_family():
    h = DegreeDistribution.explicit({2: 0.3, 3: 0.4, 5: 0.3})
    lams = np.linspace(0.05, 1.0, 60)
    kappas = [gf.solve_kappa(lambda_family(h, lam)) for lam in lams]
    assert all(b <= a + 1e-12 for a, b in zip(kappas, kappas[1:]))


def test_size_biased(p13):
    sb = gf.size_biased(p13)
    assert sb.probs == pytest.approx({0: 0.25, 2: 0.75})
    assert sb.mu == pytest.approx(p13.nu / p13.mu)


def test_zero_kappa_dual_raises_without_isolated():
    from suslab.errors import CriticalityError

    with pytest.raises(CriticalityError):
        gf.dual_distribution(DegreeDistribution.explicit({3: 1.0}))
