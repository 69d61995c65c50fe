import numpy as np
import pytest

from meanop.samples import Sample


def random_sample(rng, m=None, d=None, feature_cap=1.0):
    """Random sample with max row norm <= feature_cap."""
    m = int(rng.integers(2, 64)) if m is None else m
    d = int(rng.integers(1, 16)) if d is None else d
    X = rng.normal(size=(m, d))
    top = np.linalg.norm(X, axis=1).max()
    if top > feature_cap:
        X *= feature_cap / top
    y = rng.choice([-1.0, 1.0], size=m)
    return Sample(X, y)


def random_theta(rng, d, norm_cap=10.0):
    v = rng.normal(size=d)
    v /= max(np.linalg.norm(v), 1e-12)
    return v * rng.uniform(0.1, norm_cap)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
