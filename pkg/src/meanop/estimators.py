"""Mean-operator computation and its weak-supervision estimators.

The mean operator of a sample is the average label-weighted observation,
``mu = E[y * x]``.  For linear-odd losses it is a sufficient statistic for
the labels, so weakly supervised learning reduces to estimating this single
d-vector.  Estimators here: exact, noise-corrected for class-conditional
label noise, and positive/unlabeled.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .samples import NoiseSpec, Sample

__all__ = [
    "MeanOperator",
    "mean_op",
    "covariance_identity_check",
    "noise_corrected_mean_op",
    "pu_mean_op",
    "expected_noisy_mean_vector",
]


@dataclass(frozen=True)
class MeanOperator:
    """A d-vector with a provenance tag.

    provenance is "exact", "noise_corrected" (with the NoiseSpec used) or
    "pu" (with the class prior pi_plus).
    """

    vector: np.ndarray
    provenance: str
    noise: Optional[NoiseSpec] = None
    pi_plus: Optional[float] = None

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vector, dtype=float))
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)
        if self.provenance not in ("exact", "noise_corrected", "pu"):
            raise ValueError(f"unknown provenance {self.provenance!r}")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))


def mean_op(s: Sample) -> MeanOperator:
    """Exact mean operator (1/m) sum_i y_i x_i."""
    vec = s.observations.T @ s.labels / s.m
    return MeanOperator(vec, "exact")


def covariance_identity_check(s: Sample):
    """Evaluate both sides of mu = Cov[x, y] + (2*pi_plus - 1) * E[x].

    Returns (lhs, rhs, max_abs_diff) with the covariance computed directly
    as E[y x] - E[y] E[x].
    """
    lhs = s.observations.T @ s.labels / s.m
    pi_plus = float(np.mean(s.labels > 0))
    x_bar = s.observations.mean(axis=0)
    y_bar = float(s.labels.mean())
    cov = lhs - y_bar * x_bar
    rhs = cov + (2.0 * pi_plus - 1.0) * x_bar
    return lhs, rhs, float(np.max(np.abs(lhs - rhs)))


def noise_corrected_mean_op(s_noisy: Sample, n: NoiseSpec) -> MeanOperator:
    """Unbiased mean-operator estimate from labels with class-conditional noise.

    Each example is weighted by (y - (p_minus - p_plus)) / (1 - p_minus - p_plus);
    the average then has expectation equal to the clean mean operator under
    the flip model.
    """
    denom = 1.0 - n.total
    if denom <= 0.0:
        raise ValueError("need p_plus + p_minus < 1")
    w = (s_noisy.labels - (n.p_minus - n.p_plus)) / denom
    vec = s_noisy.observations.T @ w / s_noisy.m
    return MeanOperator(vec, "noise_corrected", noise=n)


def pu_mean_op(positives: Sample, pi_plus: float) -> MeanOperator:
    """Mean-operator surrogate from labelled positives only.

    Returns pi_plus times the average positive observation, the linear
    statistic that plays the mean operator's role when only positive and
    unlabeled data are available.  pi_plus is an input, never estimated.
    """
    if not (0.0 < pi_plus <= 1.0):
        raise ValueError("pi_plus must lie in (0, 1]")
    if np.any(positives.labels != 1.0):
        raise ValueError("pu_mean_op expects a sample of positive examples only")
    vec = pi_plus * positives.observations.mean(axis=0)
    return MeanOperator(vec, "pu", pi_plus=float(pi_plus))


def expected_noisy_mean_vector(s: Sample, n: NoiseSpec) -> np.ndarray:
    """Mean operator of the expected-noise distribution over the sample support.

    Flipping y with rate p_y scales each contribution by (1 - 2 p_y):
    E[ytilde x | x, y] = (1 - 2 p_y) y x.  Returned as a bare vector since it
    describes the noisy distribution, not an estimate of the clean one.
    """
    shrink = np.where(s.labels > 0, 1.0 - 2.0 * n.p_plus, 1.0 - 2.0 * n.p_minus)
    return s.observations.T @ (shrink * s.labels) / s.m
