"""Projected stochastic subgradient solvers on the factored objective.

The core solver walks the doubled sample: at each step it picks one signed
row uniformly at random, takes the subgradient of the loss there, adds the
mean-operator pull ``a * mu`` (scaled per update mode), applies the usual
decayed-step L2-regularized update, and projects onto the ball of radius
``1 / sqrt(lambda)``.  Weak supervision enters only through which estimate of
mu is plugged in; the loop itself never reads a label.

Update modes:

* ``"half_mu"``: adds a*mu/2 per step, the classical variant.
* ``"risk_consistent"``: adds the full a*mu, so the expected step direction
  equals the gradient of the factored empirical risk exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .estimators import MeanOperator, mean_op, noise_corrected_mean_op
from .losses import LossSpec
from .risks import Model, empirical_risk, expected_noisy_risk
from .samples import DoubledSample, NoiseSpec, Sample, double_sample

__all__ = [
    "SolverConfig",
    "Regularizer",
    "UPDATE_MODES",
    "mosgd_train",
    "mosgd_noisy",
    "sgd_baseline",
    "prox_train",
    "exact_minimizer_square",
    "minimize_risk",
    "minimize_expected_noisy_risk",
]

UPDATE_MODES = ("half_mu", "risk_consistent")


@dataclass(frozen=True)
class SolverConfig:
    """Regularization strength, iteration count, seed and update mode."""

    lam: float
    T: int
    seed: int = 0
    update_mode: str = "half_mu"

    def __post_init__(self):
        if self.lam <= 0.0:
            raise ValueError("lam must be positive")
        if self.T < 0:
            raise ValueError("T must be nonnegative")
        if self.update_mode not in UPDATE_MODES:
            raise ValueError(f"update_mode must be one of {UPDATE_MODES}")


@dataclass(frozen=True)
class Regularizer:
    """Proximal penalty: kind "l2" for (lam/2)||.||^2 or "l1" for lam*||.||_1."""

    kind: str
    lam: float

    def __post_init__(self):
        if self.kind not in ("l2", "l1"):
            raise ValueError("kind must be 'l2' or 'l1'")
        if self.lam < 0.0:
            raise ValueError("lam must be nonnegative")

    def prox(self, x: np.ndarray, step: float) -> np.ndarray:
        if self.kind == "l2":
            return x / (1.0 + step * self.lam)
        thr = step * self.lam
        return np.sign(x) * np.maximum(np.abs(x) - thr, 0.0)


def _mu_vector(mu: Union[MeanOperator, np.ndarray]) -> np.ndarray:
    return mu.vector if isinstance(mu, MeanOperator) else np.asarray(mu, dtype=float)


def _projected_sgd(
    X: np.ndarray,
    signs: np.ndarray,
    drift: Optional[np.ndarray],
    loss: LossSpec,
    lam: float,
    T: int,
    seed: int,
    callback: Optional[Callable[[int, np.ndarray], None]] = None,
) -> np.ndarray:
    """Shared pegasos-style loop: rows (X, signs), optional constant drift."""
    n, d = X.shape
    theta = np.zeros(d)
    cap = 1.0 / math.sqrt(lam)
    cap2 = cap * cap
    idx = np.random.default_rng(seed).integers(0, n, size=T)
    subgrad = loss.subgrad
    for t in range(1, T + 1):
        i = idx[t - 1]
        x = X[i]
        sgn = signs[i]
        slope = float(subgrad(sgn * float(theta @ x))) * sgn
        eta = 1.0 / (1.0 + lam * t)
        theta *= 1.0 - eta * lam
        if drift is None:
            theta -= (eta * slope) * x
        else:
            theta -= eta * (slope * x + drift)
        nrm2 = float(theta @ theta)
        if nrm2 > cap2:
            theta *= cap / math.sqrt(nrm2)
        if callback is not None:
            callback(t, theta)
    return theta


def mosgd_train(
    s2x: DoubledSample,
    mu: Union[MeanOperator, np.ndarray],
    loss: LossSpec,
    cfg: SolverConfig,
    callback: Optional[Callable[[int, np.ndarray], None]] = None,
) -> Model:
    """Train on the doubled sample plus a mean-operator estimate.

    Starts at theta = 0, uses step size 1/(1 + lam*t) and projects onto the
    ball of radius 1/sqrt(lam) after every update.  The optional callback
    receives (t, theta) after each projection.  Returns the final iterate.
    """
    if loss.odd_slope is None:
        raise ValueError(f"loss {loss.name!r} is not linear-odd")
    mu_vec = _mu_vector(mu)
    if mu_vec.shape != (s2x.d,):
        raise ValueError("mean operator dimension mismatch")
    scale = 0.5 if cfg.update_mode == "half_mu" else 1.0
    drift = loss.odd_slope * scale * mu_vec
    theta = _projected_sgd(
        s2x.observations, s2x.signs, drift, loss, cfg.lam, cfg.T, cfg.seed, callback
    )
    return Model(theta, norm_cap=1.0 / math.sqrt(cfg.lam))


def mosgd_noisy(
    s_noisy: Sample,
    loss: LossSpec,
    n: NoiseSpec,
    cfg: SolverConfig,
    callback: Optional[Callable[[int, np.ndarray], None]] = None,
) -> Model:
    """Noisy-label wrapper: doubled sample plus the noise-corrected estimate."""
    s2x = double_sample(s_noisy)
    mu_hat = noise_corrected_mean_op(s_noisy, n)
    return mosgd_train(s2x, mu_hat, loss, cfg, callback)


def sgd_baseline(
    s: Sample,
    loss: LossSpec,
    cfg: SolverConfig,
    callback: Optional[Callable[[int, np.ndarray], None]] = None,
) -> Model:
    """Vanilla projected SGD on the labelled sample, same step and projection."""
    theta = _projected_sgd(
        s.observations, s.labels, None, loss, cfg.lam, cfg.T, cfg.seed, callback
    )
    return Model(theta, norm_cap=1.0 / math.sqrt(cfg.lam))


def prox_train(
    s2x: DoubledSample,
    mu: Union[MeanOperator, np.ndarray],
    loss: LossSpec,
    regularizer: Regularizer,
    eta: float,
    T: int,
    seed: int = 0,
) -> Model:
    """Full-batch proximal gradient descent on the factored objective.

    Each step descends along the gradient of the label-free even term plus
    ``a * mu`` and applies the proximal map of the regularizer.  The seed is
    accepted for interface uniformity; full-batch iteration is deterministic.
    """
    del seed
    if loss.odd_slope is None:
        raise ValueError(f"loss {loss.name!r} is not linear-odd")
    mu_vec = _mu_vector(mu)
    X, signs = s2x.observations, s2x.signs
    n = s2x.n_rows
    theta = np.zeros(s2x.d)
    for _ in range(T):
        coef = loss.subgrad(signs * (X @ theta)) * signs
        grad_even = X.T @ coef / n
        theta = regularizer.prox(theta - eta * (grad_even + loss.odd_slope * mu_vec), eta)
    return Model(theta)


def exact_minimizer_square(
    s: Sample, lam: float, mu: Optional[Union[MeanOperator, np.ndarray]] = None
) -> Model:
    """Exact minimizer of the factored square objective by a direct solve.

    Solves (2 G + lam I) theta = 2 mu with G the uncentered Gram matrix
    X^T X / m, i.e. minimizes the square-loss risk plus (lam/2)||theta||^2.
    Passing a custom mu gives the minimizer of the risk with that estimate
    plugged in (e.g. an expected-noise or noise-corrected mean operator).
    """
    if lam < 0.0:
        raise ValueError("lam must be nonnegative")
    mu_vec = _mu_vector(mu) if mu is not None else mean_op(s).vector
    G = s.observations.T @ s.observations / s.m
    A = 2.0 * G + lam * np.eye(s.d)
    try:
        theta = np.linalg.solve(A, 2.0 * mu_vec)
    except np.linalg.LinAlgError as exc:
        raise ValueError("singular system; increase lam above 0") from exc
    if not np.all(np.isfinite(theta)) or np.linalg.norm(A @ theta - 2.0 * mu_vec) > 1e-6 * (
        1.0 + np.linalg.norm(mu_vec)
    ):
        raise ValueError("singular system; increase lam above 0")
    return Model(theta)


def _risk_grad(s: Sample, loss: LossSpec, theta: np.ndarray) -> np.ndarray:
    margins = s.labels * (s.observations @ theta)
    coef = loss.subgrad(margins) * s.labels
    return s.observations.T @ coef / s.m


def minimize_risk(
    s: Sample, loss: LossSpec, lam: float, theta0: Optional[np.ndarray] = None
) -> Model:
    """Full-batch minimizer of the L2-regularized empirical risk (oracle).

    Quasi-Newton on the smooth objective; intended for exact reference
    solutions in experiments, not for the streaming setting.
    """

    def fun(theta):
        model = Model(theta)
        val = empirical_risk(s, loss, model) + 0.5 * lam * float(theta @ theta)
        grad = _risk_grad(s, loss, theta) + lam * theta
        return val, grad

    x0 = np.zeros(s.d) if theta0 is None else np.asarray(theta0, dtype=float)
    res = _scipy_minimize(fun, x0, jac=True, method="L-BFGS-B",
                          options={"maxiter": 2000, "ftol": 1e-16, "gtol": 1e-12})
    return Model(res.x)


def minimize_expected_noisy_risk(
    s: Sample, loss: LossSpec, n: NoiseSpec, lam: float,
    theta0: Optional[np.ndarray] = None,
) -> Model:
    """Full-batch minimizer of the exact expected-flip risk (oracle)."""
    p = np.where(s.labels > 0, n.p_plus, n.p_minus)

    def fun(theta):
        model = Model(theta)
        val = expected_noisy_risk(s, loss, n, model) + 0.5 * lam * float(theta @ theta)
        margins = s.labels * (s.observations @ theta)
        coef = ((1.0 - p) * loss.subgrad(margins) - p * loss.subgrad(-margins)) * s.labels
        grad = s.observations.T @ coef / s.m + lam * theta
        return val, grad

    x0 = np.zeros(s.d) if theta0 is None else np.asarray(theta0, dtype=float)
    res = _scipy_minimize(fun, x0, jac=True, method="L-BFGS-B",
                          options={"maxiter": 2000, "ftol": 1e-16, "gtol": 1e-12})
    return Model(res.x)
