import math

import numpy as np
import pytest

from meanop.bounds import (
    BoundInputs,
    aln_epsilon,
    c_of_XB,
    empirical_rademacher_mc,
    generalization_bound,
    generalization_bound_with_deviation,
    mean_op_deviation_bound,
    minimizer_distance_bound,
    noisy_generalization_bound,
    rademacher_bound,
    rademacher_v,
)
from meanop.estimators import expected_noisy_mean_vector, mean_op
from meanop.losses import get_loss
from meanop.risks import expected_noisy_risk
from meanop.samples import NoiseSpec, Sample, double_sample
from meanop.solvers import exact_minimizer_square

from conftest import random_sample


def test_rademacher_v_values_and_cap():
    assert rademacher_v(2) == pytest.approx(0.5)
    assert rademacher_bound(1.0, 1.0, 2) == pytest.approx(0.25)
    cap = (math.sqrt(2.0) + 1.0) / math.sqrt(2.0)
    for m in range(2, 4000, 2):
        assert rademacher_v(m) < cap
    assert rademacher_v(10**12) == pytest.approx(0.5 + 0.5 / math.sqrt(2.0), abs=1e-6)
    with pytest.raises(ValueError):
        rademacher_v(7)
    with pytest.raises(ValueError):
        rademacher_v(0)


def test_empirical_rademacher_zero_data():
    s = Sample(np.zeros((6, 3)), np.ones(6))
    est = empirical_rademacher_mc(double_sample(s), B=2.0, n_draws=100, seed=0)
    assert est == 0.0


def test_empirical_rademacher_dominated_by_closed_form(rng):
    s = random_sample(rng, m=64, d=8, feature_cap=1.0)
    est, stderr = empirical_rademacher_mc(
        double_sample(s), B=1.0, n_draws=40_000, seed=1, with_stderr=True
    )
    bound = rademacher_bound(1.0, s.feature_bound, s.m)
    assert est <= bound + 3.0 * stderr


def test_empirical_rademacher_single_repeated_observation():
    """With one repeated observation the complexity is B ||x|| E|mean of
    signs|, which the binomial distribution gives in closed form."""
    m = 8
    x = np.array([0.6, 0.8])
    s = Sample(np.tile(x, (m, 1)), np.ones(m))
    est, stderr = empirical_rademacher_mc(
        double_sample(s), B=1.5, n_draws=60_000, seed=2, with_stderr=True
    )
    n = 2 * m
    exact = sum(
        math.comb(n, k) * 0.5**n * abs(2 * k - n) / n for k in range(n + 1)
    ) * 1.5 * np.linalg.norm(x)
    assert abs(est - exact) < 4.0 * stderr


def test_mean_op_deviation_bound_shape():
    assert mean_op_deviation_bound(0.0, 5, 100, 0.1) == 0.0
    b1 = mean_op_deviation_bound(1.0, 5, 100, 0.1)
    assert mean_op_deviation_bound(1.0, 5, 400, 0.1) < b1
    assert mean_op_deviation_bound(1.0, 10, 100, 0.1) > b1
    with pytest.raises(ValueError):
        mean_op_deviation_bound(1.0, 5, 100, 1.5)


def test_mean_op_deviation_coverage(rng):
    """Finite-support population: the bound must cover the sample deviation
    with frequency at least 1 - delta."""
    k, d, m, reps = 40, 5, 100, 3000
    support = rng.normal(size=(k, d))
    support /= np.abs(np.linalg.norm(support, axis=1)).max()
    labels = rng.choice([-1.0, 1.0], k)
    probs = rng.dirichlet(np.ones(k))
    mu_pop = (probs[:, None] * labels[:, None] * support).sum(axis=0)
    X_norm_cap = 1.0
    for delta in (0.05, 0.2):
        bound = mean_op_deviation_bound(X_norm_cap, d, m, delta)
        hits = 0
        for rep in range(reps):
            idx = rng.choice(k, size=m, p=probs)
            mu_s = (labels[idx, None] * support[idx]).mean(axis=0)
            hits += float(np.linalg.norm(mu_pop - mu_s) <= bound)
        assert hits / reps >= 1.0 - delta


def test_c_of_XB_values():
    assert c_of_XB(get_loss("logistic"), 1.0, 1.0) == pytest.approx(math.log(1 + math.e))
    assert c_of_XB(get_loss("square"), 1.0, 1.0) == pytest.approx(4.0)
    assert c_of_XB(get_loss("logistic"), 0.0, 5.0) == pytest.approx(math.log(2.0))


def _inputs(**kw):
    base = dict(X=1.0, B=1.0, L=1.0, a=-0.5, m=10_000, d=10, delta=0.05, c_XB=1.5)
    base.update(kw)
    return BoundInputs(**base)


def test_generalization_bound_formula():
    b = _inputs()
    want = (math.sqrt(2) + 1) / 4 / math.sqrt(b.m) + (
        0.5 * b.c_XB + 2 * 0.5 * math.sqrt(10 * math.log(10))
    ) * math.sqrt(math.log(2 / 0.05) / b.m)
    assert generalization_bound(b) == pytest.approx(want, rel=1e-12)
    assert generalization_bound(b) > 0
    # the companion constant doubles only the complexity term
    gap = generalization_bound(b, proof_constant=True) - generalization_bound(b)
    assert gap == pytest.approx((math.sqrt(2) + 1) / 4 / math.sqrt(b.m), rel=1e-12)


def test_generalization_bound_pure_complexity():
    b = _inputs(a=0.0, c_XB=0.0)
    assert generalization_bound(b) == pytest.approx(
        (math.sqrt(2) + 1) / 4 * 1.0 / math.sqrt(b.m), rel=1e-12
    )
    ratio = generalization_bound(b) / generalization_bound(_inputs(a=0.0, c_XB=0.0, m=4 * b.m))
    assert ratio == pytest.approx(2.0, rel=1e-12)


def test_generalization_bound_d1_drops_mean_operator_term():
    with_d1 = generalization_bound(_inputs(d=1))
    no_mu = generalization_bound(_inputs(d=1, a=0.0))
    assert with_d1 == pytest.approx(no_mu, rel=1e-12)


def test_generalization_bound_with_supplied_deviation():
    b = _inputs()
    v0 = generalization_bound_with_deviation(b, 0.0)
    v1 = generalization_bound_with_deviation(b, 0.3)
    assert v1 - v0 == pytest.approx(2 * abs(b.a) * b.B * 0.3, rel=1e-12)


def test_noisy_bound_reductions_and_growth():
    b = _inputs()
    assert noisy_generalization_bound(b, NoiseSpec(0.0, 0.0)) == pytest.approx(
        generalization_bound(b), rel=1e-12
    )
    grid = [0.0, 0.1, 0.2, 0.3, 0.4, 0.49]
    vals = [noisy_generalization_bound(b, NoiseSpec(p, p)) for p in grid]
    assert all(y > x for x, y in zip(vals, vals[1:]))
    # the complexity term never moves with noise
    comp = generalization_bound(_inputs(a=0.0, c_XB=0.0))
    comp_noisy = noisy_generalization_bound(_inputs(a=0.0, c_XB=0.0), NoiseSpec(0.4, 0.4))
    assert comp_noisy == pytest.approx(comp, rel=1e-12)
    assert noisy_generalization_bound(b, NoiseSpec(0.49, 0.49)) > 5 * generalization_bound(b)


def test_aln_epsilon_values():
    assert aln_epsilon(-0.5, 1.0, NoiseSpec(0.2, 0.1), 0.0) == 0.0
    assert aln_epsilon(-0.5, 1.0, NoiseSpec(0.0, 0.0), 3.0) == 0.0
    assert aln_epsilon(-0.5, 1.0, NoiseSpec(0.2, 0.1), 1.0) == pytest.approx(0.4)


def test_minimizer_distance_bound_values():
    assert minimizer_distance_bound(0.0, 2.0) == 0.0
    assert minimizer_distance_bound(0.1, 2.0) == pytest.approx(math.sqrt(0.1))
    with pytest.raises(ValueError):
        minimizer_distance_bound(0.1, 0.0)
    with pytest.raises(ValueError):
        minimizer_distance_bound(-0.1, 1.0)


def _robustness_case(rng, p_plus, p_minus):
    """Exact minimizers of clean and expected-noise square risks, lam = 0."""
    while True:
        d = int(rng.integers(2, 6))
        m = int(rng.integers(d + 3, 40))
        X = rng.normal(size=(m, d))
        G = X.T @ X / m
        if np.linalg.cond(G) < 1e6:
            break
    s = Sample(X, rng.choice([-1.0, 1.0], m))
    noise = NoiseSpec(p_plus=p_plus, p_minus=p_minus)
    th_star = exact_minimizer_square(s, 0.0)
    th_tilde = exact_minimizer_square(s, 0.0, mu=expected_noisy_mean_vector(s, noise))
    loss = get_loss("square")
    gap = expected_noisy_risk(s, loss, noise, th_star) - expected_noisy_risk(
        s, loss, noise, th_tilde
    )
    B = max(np.linalg.norm(th_star.theta), np.linalg.norm(th_tilde.theta))
    eps = aln_epsilon(loss.odd_slope, B, noise, mean_op(s).norm)
    gamma = 2.0 * float(np.linalg.eigvalsh(G).min())
    dist2 = float(np.linalg.norm(th_star.theta - th_tilde.theta) ** 2)
    return gap, eps, gamma, dist2


def test_robustness_budget_dominates_symmetric_rates(rng):
    for _ in range(20):
        p = float(rng.uniform(0.0, 0.5))
        gap, eps, gamma, dist2 = _robustness_case(rng, p, p)
        assert gap <= eps + 1e-10
        assert dist2 <= 2.0 * eps / gamma + 1e-10
        assert math.sqrt(dist2) <= minimizer_distance_bound(eps, gamma) + 1e-8


def test_asymmetric_rates_can_exceed_budget():
    """The budget formula is proved through the symmetric-rate argument.
    With unequal rates and a vanishing mean operator the excess noisy risk
    can be strictly positive while the budget is zero, so dominance tests
    use symmetric rates; this pins the counterexample."""
    s = Sample(np.array([[1.0], [1.0]]), np.array([1.0, -1.0]))
    noise = NoiseSpec(p_plus=0.4, p_minus=0.0)
    assert mean_op(s).norm == 0.0
    th_star = exact_minimizer_square(s, 0.0)
    th_tilde = exact_minimizer_square(s, 0.0, mu=expected_noisy_mean_vector(s, noise))
    loss = get_loss("square")
    gap = expected_noisy_risk(s, loss, noise, th_star) - expected_noisy_risk(
        s, loss, noise, th_tilde
    )
    B = max(np.linalg.norm(th_star.theta), np.linalg.norm(th_tilde.theta))
    eps = aln_epsilon(loss.odd_slope, B, noise, mean_op(s).norm)
    assert eps == 0.0
    assert gap == pytest.approx(0.16, abs=1e-12)


def test_bound_monotonicity():
    base = _inputs(m=100)
    for field, values in {
        "X": (1.0, 2.0, 3.0),
        "B": (1.0, 2.0, 3.0),
        "L": (1.0, 2.0, 3.0),
        "d": (2, 4, 8),
    }.items():
        vals = [generalization_bound(_inputs(m=100, **{field: v})) for v in values]
        assert all(y >= x for x, y in zip(vals, vals[1:])), field
    a_vals = [generalization_bound(_inputs(m=100, a=a)) for a in (-0.25, -0.5, -1.0)]
    assert all(y >= x for x, y in zip(a_vals, a_vals[1:]))
    m_vals = [generalization_bound(_inputs(m=m)) for m in (100, 400, 1600)]
    assert all(y <= x for x, y in zip(m_vals, m_vals[1:]))
    # the doubled-sample complexity cap decreases in m once past the smallest
    # admissible sizes (m = 2 -> 4 is the lone increasing step of v/sqrt(2m))
    r_vals = [rademacher_bound(1.0, 1.0, m) for m in range(4, 200, 2)]
    assert all(y <= x for x, y in zip(r_vals, r_vals[1:]))


def test_bound_inputs_validation():
    with pytest.raises(ValueError):
        _inputs(delta=0.0)
    with pytest.raises(ValueError):
        _inputs(m=0)
    with pytest.raises(ValueError):
        _inputs(X=-1.0)
