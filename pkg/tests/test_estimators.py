import numpy as np
import pytest

from meanop.estimators import (
    covariance_identity_check,
    expected_noisy_mean_vector,
    mean_op,
    noise_corrected_mean_op,
    pu_mean_op,
)
from meanop.losses import catalog, get_loss
from meanop.risks import Model, empirical_risk
from meanop.samples import NoiseSpec, Sample, inject_noise

from conftest import random_sample, random_theta


def test_mean_op_values():
    s = Sample(np.array([[1.0, 0.0]]), np.array([1.0]))
    assert np.array_equal(mean_op(s).vector, np.array([1.0, 0.0]))
    s2 = Sample(np.array([[2.0, 3.0], [2.0, 3.0]]), np.array([1.0, -1.0]))
    assert np.array_equal(mean_op(s2).vector, np.zeros(2))
    assert mean_op(s2).provenance == "exact"


def test_mean_op_scale_equivariance(rng):
    s = random_sample(rng, m=20, d=4)
    c = 3.7
    scaled = Sample(c * s.observations, s.labels)
    assert np.allclose(mean_op(scaled).vector, c * mean_op(s).vector, atol=1e-12)


def test_mean_op_norm_within_feature_bound(rng):
    s = random_sample(rng, m=30, d=5, feature_cap=2.0)
    assert mean_op(s).norm <= s.feature_bound + 1e-12


def test_covariance_identity_centered(rng):
    X = rng.normal(size=(40, 3))
    X -= X.mean(axis=0)
    s = Sample(X, rng.choice([-1.0, 1.0], 40))
    lhs, rhs, diff = covariance_identity_check(s)
    assert diff < 1e-12
    y_bar = s.labels.mean()
    cov = lhs - y_bar * X.mean(axis=0)
    assert np.allclose(lhs, cov, atol=1e-12)


def test_covariance_identity_balanced(rng):
    X = rng.normal(size=(40, 3))
    y = np.array([1.0, -1.0] * 20)
    s = Sample(X, y)
    lhs, rhs, diff = covariance_identity_check(s)
    assert diff < 1e-12
    cov = lhs - y.mean() * X.mean(axis=0)
    assert np.allclose(rhs, cov, atol=1e-12)


def test_covariance_identity_property(rng):
    for _ in range(100):
        s = random_sample(rng, feature_cap=5.0)
        _, _, diff = covariance_identity_check(s)
        assert diff < 1e-12


def test_noise_corrected_zero_rates(rng):
    s = random_sample(rng, m=25, d=3)
    est = noise_corrected_mean_op(s, NoiseSpec(0.0, 0.0))
    assert np.allclose(est.vector, mean_op(s).vector, atol=1e-15)
    assert est.provenance == "noise_corrected"
    assert est.noise == NoiseSpec(0.0, 0.0)


def test_noise_corrected_single_positive_weight():
    # weight for y=+1 is (1 - (p_minus - p_plus)) / (1 - p_minus - p_plus);
    # with p_minus=0.2, p_plus=0 that is 0.8/0.8 = 1, as unbiasedness demands
    # (a never-flipped positive must keep weight one).
    x = np.array([[2.0, -1.0]])
    s = Sample(x, np.array([1.0]))
    est = noise_corrected_mean_op(s, NoiseSpec(p_plus=0.0, p_minus=0.2))
    assert np.allclose(est.vector, x[0], atol=1e-15)


def test_noise_corrected_unbiased_monte_carlo(rng):
    m, d = 120, 4
    s = random_sample(rng, m=m, d=d, feature_cap=2.0)
    spec = NoiseSpec(p_plus=0.3, p_minus=0.1)
    reps = 3000
    draws = np.empty((reps, d))
    for k in range(reps):
        draws[k] = noise_corrected_mean_op(inject_noise(s, spec, seed=k), spec).vector
    target = mean_op(s).vector
    stderr = draws.std(axis=0, ddof=1) / np.sqrt(reps)
    assert np.all(np.abs(draws.mean(axis=0) - target) < 4.0 * stderr)


def test_pu_mean_op_values():
    xs = np.array([[2.0, 0.0], [2.0, 0.0]])
    positives = Sample(xs, np.ones(2))
    assert np.allclose(pu_mean_op(positives, 1.0).vector, np.array([2.0, 0.0]))
    est = pu_mean_op(positives, 0.5)
    assert np.allclose(est.vector, np.array([1.0, 0.0]))
    assert est.provenance == "pu" and est.pi_plus == 0.5


def test_pu_mean_op_rejects_negatives_and_bad_prior():
    s = Sample(np.ones((2, 2)), np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        pu_mean_op(s, 0.5)
    pos = Sample(np.ones((2, 2)), np.ones(2))
    with pytest.raises(ValueError):
        pu_mean_op(pos, 0.0)


def test_pu_mean_op_mirror_symmetry_relation():
    """On a balanced sample whose negatives mirror positives (x -> -x),
    the full mean operator equals 2 * pi_plus * E+[x], i.e. exactly twice
    the positive-only statistic pi_plus * E+[x]."""
    pos = np.array([[1.0, 2.0], [3.0, -1.0]])
    X = np.vstack([pos, -pos])
    y = np.array([1.0, 1.0, -1.0, -1.0])
    s = Sample(X, y)
    positives = Sample(pos, np.ones(2))
    est = pu_mean_op(positives, pi_plus=0.5)
    assert np.allclose(mean_op(s).vector, 2.0 * est.vector, atol=1e-15)


def test_mean_op_sufficiency_for_linear_odd_losses():
    """Two samples sharing observations and mean operator give identical
    risks for every linear-odd loss at every model; a non-linear-odd loss
    tells them apart."""
    X = np.array([[1.0, 0.0], [0.0, 1.0], [3.0, 2.0], [4.0, 1.0], [1.0, 1.0]])
    y_a = np.array([1.0, -1.0, 1.0, -1.0, 1.0])
    y_b = np.array([-1.0, 1.0, -1.0, 1.0, 1.0])  # x1 + x3 = x2 + x4, labels permuted
    s_a, s_b = Sample(X, y_a), Sample(X, y_b)
    assert not np.array_equal(y_a, y_b)
    assert np.allclose(mean_op(s_a).vector, mean_op(s_b).vector, atol=1e-15)

    rng = np.random.default_rng(0)
    thetas = [random_theta(rng, 2, norm_cap=5.0) for _ in range(8)]
    for loss in catalog():
        if loss.odd_slope is None:
            continue
        for th in thetas:
            model = Model(th)
            ra, rb = empirical_risk(s_a, loss, model), empirical_risk(s_b, loss, model)
            assert abs(ra - rb) < 1e-12 * (1.0 + abs(ra)), loss.name
    hinge = get_loss("hinge")
    gaps = [
        abs(empirical_risk(s_a, hinge, Model(th)) - empirical_risk(s_b, hinge, Model(th)))
        for th in thetas
    ]
    assert max(gaps) > 1e-3


def test_expected_noisy_mean_vector_symmetric_shrinkage(rng):
    s = random_sample(rng, m=30, d=4)
    p = 0.2
    vec = expected_noisy_mean_vector(s, NoiseSpec(p, p))
    assert np.allclose(vec, (1.0 - 2.0 * p) * mean_op(s).vector, atol=1e-14)
