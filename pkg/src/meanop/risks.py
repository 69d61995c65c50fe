"""Empirical risk in plain and factored forms.

The central identity: for a linear-odd loss with slope a and linear model
theta, the empirical risk over a labelled sample equals the average loss over
the doubled (label-free) sample plus ``a * <theta, mu>``:

    (1/m) sum_i l(y_i <theta, x_i>)
        = (1/2m) sum_{doubled rows} l(sigma_j <theta, x_j>) + a <theta, mu>.

The first term is the even part of the loss averaged over observations and
never sees a label; the mean operator mu carries all label information.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .estimators import MeanOperator
from .losses import LossSpec, odd_part
from .samples import DoubledSample, NoiseSpec, Sample

__all__ = [
    "Model",
    "empirical_risk",
    "factored_risk",
    "estimated_risk",
    "general_factored_risk",
    "regression_factored_objective",
    "expected_noisy_risk",
    "zero_one_error",
]


@dataclass(frozen=True)
class Model:
    """A linear hypothesis theta, optionally certified to lie in a norm ball."""

    theta: np.ndarray
    norm_cap: Optional[float] = None

    def __post_init__(self):
        th = np.ascontiguousarray(np.asarray(self.theta, dtype=float))
        if th.ndim != 1:
            raise ValueError("theta must be a vector")
        th.setflags(write=False)
        object.__setattr__(self, "theta", th)
        if self.norm_cap is not None and np.linalg.norm(th) > self.norm_cap + 1e-12:
            raise ValueError("theta violates its norm cap")

    @property
    def d(self) -> int:
        return self.theta.shape[0]

    def scores(self, observations: np.ndarray) -> np.ndarray:
        return observations @ self.theta


def _check_dims(d_data: int, model: Model):
    if model.d != d_data:
        raise ValueError(f"dimension mismatch: data d={d_data}, model d={model.d}")


def _mu_vector(mu: Union[MeanOperator, np.ndarray]) -> np.ndarray:
    return mu.vector if isinstance(mu, MeanOperator) else np.asarray(mu, dtype=float)


def empirical_risk(s: Sample, loss: LossSpec, model: Model) -> float:
    """(1/m) sum_i l(y_i <theta, x_i>)."""
    _check_dims(s.d, model)
    margins = s.labels * model.scores(s.observations)
    return float(np.mean(loss.eval(margins)))


def factored_risk(
    s2x: DoubledSample,
    mu: Union[MeanOperator, np.ndarray],
    loss: LossSpec,
    model: Model,
) -> float:
    """Label-free even term plus the linear label term a * <theta, mu>.

    The even term is the plain average of the loss over the 2m doubled rows,
    which equals the even part of the loss averaged over the m observations.
    Requires a linear-odd loss.
    """
    if loss.odd_slope is None:
        raise ValueError(f"loss {loss.name!r} is not linear-odd")
    _check_dims(s2x.d, model)
    even_term = float(np.mean(loss.eval(s2x.signs * model.scores(s2x.observations))))
    return even_term + loss.odd_slope * float(model.theta @ _mu_vector(mu))


def estimated_risk(
    s2x: DoubledSample,
    mu_hat: Union[MeanOperator, np.ndarray],
    loss: LossSpec,
    model: Model,
) -> float:
    """Factored risk with an estimated mean operator plugged in."""
    return factored_risk(s2x, mu_hat, loss, model)


def general_factored_risk(s: Sample, loss: LossSpec, model: Model):
    """Even/odd split of the risk for an arbitrary margin loss.

    Returns (even_term, odd_term): the label-free average of the even part
    over observations and the average odd part at the signed margins.  Their
    sum equals the empirical risk for any margin loss.
    """
    _check_dims(s.d, model)
    scores = model.scores(s.observations)
    even_term = float(np.mean(loss.eval(scores) + loss.eval(-scores)) / 2.0)
    odd_term = float(np.mean(odd_part(loss, s.labels * scores)))
    return even_term, odd_term


def regression_factored_objective(observations: np.ndarray, targets: np.ndarray, model: Model):
    """Square-loss regression split into a label-free and a linear term.

    Returns (lhs, rhs) with lhs = E[(<theta, x> - y)^2] and
    rhs = E[<theta, x>^2] + E[y^2] - 2 <theta, mu>; they agree identically.
    Targets may be any reals, so raw arrays are taken instead of a Sample.
    """
    observations = np.asarray(observations, dtype=float)
    targets = np.asarray(targets, dtype=float)
    _check_dims(observations.shape[1], model)
    scores = model.scores(observations)
    lhs = float(np.mean((scores - targets) ** 2))
    mu = observations.T @ targets / observations.shape[0]
    rhs = float(np.mean(scores**2) + np.mean(targets**2) - 2.0 * (model.theta @ mu))
    return lhs, rhs


def expected_noisy_risk(s: Sample, loss: LossSpec, n: NoiseSpec, model: Model) -> float:
    """Risk under the expected label-flip distribution on the sample support.

    Each example contributes (1 - p_y) l(y h) + p_y l(-y h) exactly; no flips
    are sampled, so dominance tests against this quantity carry no Monte
    Carlo error.
    """
    _check_dims(s.d, model)
    margins = s.labels * model.scores(s.observations)
    p = np.where(s.labels > 0, n.p_plus, n.p_minus)
    return float(np.mean((1.0 - p) * loss.eval(margins) + p * loss.eval(-margins)))


def zero_one_error(s: Sample, model: Model) -> float:
    """Fraction of examples with nonpositive margin."""
    return float(np.mean(s.labels * model.scores(s.observations) <= 0.0))
