"""Desk-scale experiment harness: noise-robustness sweeps and solver comparisons.

Three studies, each emitting plot-ready records:

* ``run_figure2`` - a planar toy family where clean and expected-noise square
  objectives are minimized exactly; measures how far the clean minimizer is
  from noisy-optimal as the geometry and the flip rates vary.
* ``run_figure3`` - symmetric-flip sweeps on whole datasets with a full
  optimizer; relates p * ||mu|| to the clean-risk gap of the noisy-trained
  model.
* ``run_table2`` - hold-out comparison of vanilla SGD on corrupted labels
  against the mean-operator solver fed the noise-corrected estimate, with
  per-algorithm cross-validation of the regularization weight.

Every record is reproducible bit for bit from its experiment id, the master
seed and the configuration.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.stats import spearmanr

from .bounds import aln_epsilon
from .estimators import expected_noisy_mean_vector, mean_op
from .losses import LossSpec, get_loss
from .risks import Model, empirical_risk, expected_noisy_risk, zero_one_error
from .samples import NoiseSpec, Sample, double_sample, inject_noise, k_folds, split
from .solvers import (
    SolverConfig,
    exact_minimizer_square,
    minimize_expected_noisy_risk,
    minimize_risk,
    mosgd_noisy,
    sgd_baseline,
)

__all__ = [
    "ExperimentRecord",
    "toy_dataset",
    "gaussian_pair_sample",
    "uci_surrogates",
    "run_figure2",
    "run_figure3",
    "run_table2",
    "emit",
    "load_records",
    "DEFAULT_LAMBDA_GRID",
    "DEFAULT_NOISE_GRID",
]

DEFAULT_LAMBDA_GRID = tuple(10.0**k for k in range(-3, 4))
# (p_minus, p_plus) cells of the hold-out comparison.
DEFAULT_NOISE_GRID = (
    (0.0, 0.0),
    (0.2, 0.0),
    (0.2, 0.1),
    (0.2, 0.2),
    (0.2, 0.3),
    (0.2, 0.4),
    (0.2, 0.49),
)

_BOUNDED_METRICS = ("test_error_sgd", "test_error_mosgd", "r01_noisy_model")


@dataclass(frozen=True)
class ExperimentRecord:
    """One grid point of one study, with its metric map."""

    experiment_id: str
    dataset: str
    noise: NoiseSpec
    loss: str
    lam: float
    T: int
    seed: int
    metrics: dict = field(default_factory=dict)

    def __post_init__(self):
        for key, val in self.metrics.items():
            if not math.isfinite(val):
                raise ValueError(f"metric {key} is not finite")
        dm = self.metrics.get("d_models")
        if dm is not None and not (-1.0 - 1e-9 <= dm <= 1.0 + 1e-9):
            raise ValueError("d_models must lie in [-1, 1]")
        for key in _BOUNDED_METRICS:
            val = self.metrics.get(key)
            if val is not None and not (0.0 <= val <= 1.0):
                raise ValueError(f"{key} must lie in [0, 1]")


def _derived_seed(*parts: int) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


# ---------------------------------------------------------------------------
# datasets


def toy_dataset(phi: float, neg_weight: int = 5) -> tuple[Sample, float]:
    """Planar toy family: one negative at (0, 1) against three positives.

    The negative observation carries multiplicity ``neg_weight`` (realized as
    repeated rows); the positives sit at (phi/3, 1/3).  Returns the sample
    together with its numerically computed mean-operator norm, which is the
    quantity the robustness budget depends on.
    """
    if phi <= 0:
        raise ValueError("phi must be positive")
    if neg_weight < 1:
        raise ValueError("neg_weight must be a positive integer")
    neg = np.tile([0.0, 1.0], (neg_weight, 1))
    pos = np.tile([phi / 3.0, 1.0 / 3.0], (3, 1))
    s = Sample(
        np.vstack([neg, pos]),
        np.concatenate([-np.ones(neg_weight), np.ones(3)]),
    )
    return s, mean_op(s).norm


def gaussian_pair_sample(
    m: int,
    d: int,
    separation: float,
    offset: float,
    seed: int,
    noise_scale: float = 1.0,
    pi_plus: float = 0.5,
) -> Sample:
    """Two Gaussian clouds at +-separation * e1, both shifted by offset * e2.

    The common offset leaves the clean mean operator untouched but makes
    class-asymmetric label noise drag naive learners off axis, which is the
    failure mode the corrected estimator repairs.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    rng = np.random.default_rng(seed)
    y = np.where(rng.random(m) < pi_plus, 1.0, -1.0)
    X = noise_scale * rng.normal(size=(m, d))
    X[:, 0] += y * separation
    X[:, 1] += offset
    return Sample(X, y)


_SURROGATE_PARAMS = {
    "synth_a": dict(m=300, d=8, separation=1.3, offset=2.0),
    "synth_b": dict(m=500, d=12, separation=1.1, offset=2.5),
    "synth_c": dict(m=700, d=6, separation=1.5, offset=1.8),
}


def uci_surrogates(seed: int = 0) -> dict[str, Sample]:
    """Three benchmark-sized synthetic datasets with distinct geometries."""
    out = {}
    for i, (name, kw) in enumerate(_SURROGATE_PARAMS.items()):
        out[name] = gaussian_pair_sample(seed=_derived_seed(seed, 91, i), **kw)
    return out


# ---------------------------------------------------------------------------
# study 1: exact minimizers on the toy family


def _exact_pair(s: Sample, loss: LossSpec, noise: NoiseSpec, lam: float):
    """Clean and expected-noise minimizers, exact where possible."""
    if loss.name == "square":
        th_star = exact_minimizer_square(s, lam)
        th_tilde = exact_minimizer_square(s, lam, mu=expected_noisy_mean_vector(s, noise))
    else:
        th_star = minimize_risk(s, loss, lam)
        th_tilde = minimize_expected_noisy_risk(s, loss, noise, lam)
    return th_star, th_tilde


def run_figure2(
    phi_grid: Sequence[float],
    p_grid: Sequence[float],
    lam: float = 1e-6,
    loss: Optional[LossSpec] = None,
    neg_weight: int = 5,
):
    """Sweep the toy family over geometry (phi) and symmetric flip rate (p).

    At each grid point the clean minimizer theta* and the expected-noise
    minimizer theta~* are computed exactly, along with the gaps d_noisy and
    d_clean, the alignment d_models and the robustness budget.  Gaps compare
    the lam-regularized objectives the learner actually minimizes (at lam = 0
    these are plain risk gaps), so both are nonnegative and the robustness
    budget applies exactly; unregularized risks at regularized minimizers can
    dip negative once the signal direction's variance falls below lam.
    Returns (records, checks) with budget dominance and zero-noise sanity.
    """
    loss = loss if loss is not None else get_loss("square")
    if loss.odd_slope is None:
        raise ValueError("study needs a linear-odd loss")
    records = []
    dominance_ok = True
    zero_noise_ok = True
    for p in p_grid:
        noise = NoiseSpec(p, p)
        for phi in phi_grid:
            s, mu_norm = toy_dataset(phi, neg_weight)
            th_star, th_tilde = _exact_pair(s, loss, noise, lam)

            def reg(model):
                return 0.5 * lam * float(model.theta @ model.theta)

            d_noisy = (
                expected_noisy_risk(s, loss, noise, th_star) + reg(th_star)
            ) - (expected_noisy_risk(s, loss, noise, th_tilde) + reg(th_tilde))
            d_clean = (empirical_risk(s, loss, th_tilde) + reg(th_tilde)) - (
                empirical_risk(s, loss, th_star) + reg(th_star)
            )
            n_star = float(np.linalg.norm(th_star.theta))
            n_tilde = float(np.linalg.norm(th_tilde.theta))
            metrics = {
                "d_noisy": d_noisy,
                "d_clean": d_clean,
                "mu_norm_clean": mu_norm,
                "mu_norm_noisy": float(
                    np.linalg.norm(expected_noisy_mean_vector(s, noise))
                ),
                "phi": phi,
            }
            if n_star > 0.0 and n_tilde > 0.0:
                metrics["d_models"] = float(
                    np.clip(th_star.theta @ th_tilde.theta / (n_star * n_tilde), -1.0, 1.0)
                )
            budget = aln_epsilon(loss.odd_slope, max(n_star, n_tilde), noise, mu_norm)
            metrics["eps_budget"] = budget
            if d_noisy > budget + 1e-10:
                dominance_ok = False
            if p == 0.0 and abs(d_noisy) > 1e-8:
                zero_noise_ok = False
            records.append(
                ExperimentRecord(
                    experiment_id=f"figure2/p-{p:g}/phi-{phi:g}",
                    dataset=f"toy(neg_weight={neg_weight})",
                    noise=noise,
                    loss=loss.name,
                    lam=lam,
                    T=0,
                    seed=0,
                    metrics=metrics,
                )
            )
    checks = {"robustness_budget_dominates": dominance_ok, "zero_noise_gap_is_zero": zero_noise_ok}
    return records, checks


# ---------------------------------------------------------------------------
# study 2: flip sweeps on whole datasets


def run_figure3(
    datasets: dict[str, Sample],
    p_grid: Sequence[float],
    lam: float = 1e-6,
    loss: Optional[LossSpec] = None,
    trials: int = 25,
    master_seed: int = 0,
):
    """Symmetric label-flip sweep with a full optimizer on each noisy draw.

    Per (dataset, p, trial): fit on the flipped sample, then record the clean
    risk gap d_clean over the clean minimizer, the clean 0/1 error of the
    noisy-trained model, p * ||mu|| and the realized noisy-sample mean-operator
    norm.  Returns (records, checks) with a Spearman summary in checks.
    """
    loss = loss if loss is not None else get_loss("logistic")
    records = []
    zero_noise_ok = True
    for di, (name, s) in enumerate(sorted(datasets.items())):
        th_star = minimize_risk(s, loss, lam)
        r_star = empirical_risk(s, loss, th_star)
        mu_norm = mean_op(s).norm
        for pi, p in enumerate(p_grid):
            noise = NoiseSpec(p, p)
            for k in range(trials):
                seed = _derived_seed(master_seed, 3, di, pi, k)
                s_noisy = inject_noise(s, noise, seed)
                th_tilde = minimize_risk(s_noisy, loss, lam)
                d_clean = empirical_risk(s, loss, th_tilde) - r_star
                metrics = {
                    "d_clean": d_clean,
                    "r01_noisy_model": zero_one_error(s, th_tilde),
                    "p_mu_norm": p * mu_norm,
                    "mu_norm_clean": mu_norm,
                    "mu_norm_noisy": mean_op(s_noisy).norm,
                }
                if p == 0.0 and abs(d_clean) > 1e-6:
                    zero_noise_ok = False
                records.append(
                    ExperimentRecord(
                        experiment_id=f"figure3/{name}/p-{p:g}/trial-{k}",
                        dataset=name,
                        noise=noise,
                        loss=loss.name,
                        lam=lam,
                        T=0,
                        seed=seed,
                        metrics=metrics,
                    )
                )
    rho = spearman_p_mu_vs_gap(records)
    checks = {
        "zero_noise_gap_is_zero": zero_noise_ok,
        "spearman_p_mu_vs_d_clean": rho,
    }
    return records, checks


def spearman_p_mu_vs_gap(records: Sequence[ExperimentRecord]) -> float:
    """Rank correlation between p * ||mu|| and d_clean across records.

    Returns nan when either side is constant (e.g. a single-p sweep).
    """
    xs = [r.metrics["p_mu_norm"] for r in records if "p_mu_norm" in r.metrics]
    ys = [r.metrics["d_clean"] for r in records if "p_mu_norm" in r.metrics]
    if len(xs) < 3:
        raise ValueError("need at least 3 records")
    if len(set(xs)) < 2 or len(set(ys)) < 2:
        return float("nan")
    return float(spearmanr(xs, ys).statistic)


# ---------------------------------------------------------------------------
# study 3: hold-out comparison with cross-validated regularization


def _cv_pick_lambda(train_noisy, noise, loss, lambda_grid, folds, epochs, seed, algo, mode):
    """Mean validation 0/1 error per lambda; ties break toward more regularization."""
    fold_list = k_folds(train_noisy, folds, seed)
    best_lam, best_err = None, None
    for lam in lambda_grid:
        errs = []
        for fi, (ftrain, fval) in enumerate(fold_list):
            cfg = SolverConfig(lam=lam, T=epochs * 2 * ftrain.m,
                               seed=_derived_seed(seed, fi), update_mode=mode)
            model = _train_algo(algo, ftrain, noise, loss, cfg)
            errs.append(zero_one_error(fval, model))
        err = float(np.mean(errs))
        if best_err is None or err < best_err or (err == best_err and lam > best_lam):
            best_lam, best_err = lam, err
    return best_lam, best_err


def _train_algo(algo, train_noisy, noise, loss, cfg):
    if algo == "sgd":
        return sgd_baseline(train_noisy, loss, cfg)
    if algo == "mosgd":
        return mosgd_noisy(train_noisy, loss, noise, cfg)
    raise ValueError(f"unknown algo {algo!r}")


def run_table2(
    dataset_name: str,
    s: Sample,
    noise_grid: Sequence[tuple[float, float]] = DEFAULT_NOISE_GRID,
    trials: int = 25,
    folds: int = 5,
    lambda_grid: Sequence[float] = DEFAULT_LAMBDA_GRID,
    master_seed: int = 0,
    test_fraction: float = 0.2,
    epochs: int = 4,
    update_mode: str = "half_mu",
    loss: Optional[LossSpec] = None,
):
    """Hold-out error of vanilla SGD vs the mean-operator solver under noise.

    One random train/test split; per (cell, trial) the training labels are
    flipped at the cell's (p_minus, p_plus) rates, lambda is cross-validated
    per algorithm on the noisy training folds, and both solvers run for
    ``epochs`` passes over the doubled training set.  Returns
    (records, summary, checks); the summary maps each cell to mean test
    errors and their difference (mean-operator minus baseline).
    """
    loss = loss if loss is not None else get_loss("logistic")
    train_full, test = split(s, test_fraction, seed=_derived_seed(master_seed, 5))
    records = []
    summary = {}
    in_range = True
    for ci, (p_minus, p_plus) in enumerate(noise_grid):
        noise = NoiseSpec(p_plus=p_plus, p_minus=p_minus)
        errs = {"sgd": [], "mosgd": []}
        for k in range(trials):
            trial_seed = _derived_seed(master_seed, 7, ci, k)
            train_noisy = inject_noise(train_full, noise, trial_seed)
            metrics = {}
            for algo in ("sgd", "mosgd"):
                lam, cv_err = _cv_pick_lambda(
                    train_noisy, noise, loss, lambda_grid, folds,
                    epochs, _derived_seed(trial_seed, 11), algo, update_mode,
                )
                cfg = SolverConfig(
                    lam=lam, T=epochs * 2 * train_noisy.m,
                    seed=_derived_seed(trial_seed, 13), update_mode=update_mode,
                )
                model = _train_algo(algo, train_noisy, noise, loss, cfg)
                err = zero_one_error(test, model)
                errs[algo].append(err)
                metrics[f"test_error_{algo}"] = err
                metrics[f"lambda_{algo}"] = lam
                metrics[f"cv_error_{algo}"] = cv_err
                if not (0.0 <= err <= 1.0):
                    in_range = False
            records.append(
                ExperimentRecord(
                    experiment_id=f"table2/{dataset_name}/pm-{p_minus:g}-pp-{p_plus:g}/trial-{k}",
                    dataset=dataset_name,
                    noise=noise,
                    loss=loss.name,
                    lam=metrics["lambda_mosgd"],
                    T=epochs * 2 * train_noisy.m,
                    seed=trial_seed,
                    metrics=metrics,
                )
            )
        cell = {
            "sgd": float(np.mean(errs["sgd"])),
            "mosgd": float(np.mean(errs["mosgd"])),
        }
        cell["diff"] = cell["mosgd"] - cell["sgd"]
        summary[f"({p_minus:g},{p_plus:g})"] = cell
    checks = {"test_errors_in_range": in_range}
    return records, summary, checks


# ---------------------------------------------------------------------------
# record I/O

_CORE_FIELDS = ("experiment_id", "dataset", "loss", "lam", "T", "seed", "p_plus", "p_minus")


def emit(records: Sequence[ExperimentRecord], format: str, path) -> None:
    """Write records as columnar CSV or JSON lines; round-trips through load.

    CSV columns: the core fields followed by the sorted union of metric
    names, one metric per column; absent metrics are left empty.
    """
    if not records:
        raise ValueError("no records to emit")
    if format == "csv":
        metric_names = sorted({k for r in records for k in r.metrics})
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(list(_CORE_FIELDS) + metric_names)
            for r in records:
                row = [
                    r.experiment_id, r.dataset, r.loss, repr(r.lam), r.T, r.seed,
                    repr(r.noise.p_plus), repr(r.noise.p_minus),
                ]
                row += [repr(r.metrics[k]) if k in r.metrics else "" for k in metric_names]
                writer.writerow(row)
    elif format == "json":
        with open(path, "w") as fh:
            for r in records:
                fh.write(json.dumps({
                    "experiment_id": r.experiment_id,
                    "dataset": r.dataset,
                    "loss": r.loss,
                    "lam": r.lam,
                    "T": r.T,
                    "seed": r.seed,
                    "p_plus": r.noise.p_plus,
                    "p_minus": r.noise.p_minus,
                    "metrics": r.metrics,
                }) + "\n")
    else:
        raise ValueError("format must be 'csv' or 'json'")


def _record_from_parts(parts: dict, metrics: dict) -> ExperimentRecord:
    return ExperimentRecord(
        experiment_id=parts["experiment_id"],
        dataset=parts["dataset"],
        noise=NoiseSpec(p_plus=float(parts["p_plus"]), p_minus=float(parts["p_minus"])),
        loss=parts["loss"],
        lam=float(parts["lam"]),
        T=int(parts["T"]),
        seed=int(parts["seed"]),
        metrics=metrics,
    )


def load_records(path, format: Optional[str] = None) -> list[ExperimentRecord]:
    """Read records written by :func:`emit`; format inferred from the suffix."""
    if format is None:
        format = "json" if str(path).endswith((".json", ".jsonl")) else "csv"
    records = []
    if format == "csv":
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                metrics = {
                    k: float(v)
                    for k, v in row.items()
                    if k not in _CORE_FIELDS and v not in (None, "")
                }
                records.append(_record_from_parts(row, metrics))
    elif format == "json":
        with open(path) as fh:
            for line in fh:
                if not line.strip():
                    continue
                obj = json.loads(line)
                records.append(_record_from_parts(obj, dict(obj["metrics"])))
    else:
        raise ValueError("format must be 'csv' or 'json'")
    if not records:
        raise ValueError(f"no records found in {path}")
    return records
