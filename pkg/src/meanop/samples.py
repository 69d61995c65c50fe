"""Labelled samples, the doubled sample, label noise, CSV ingestion, splits.

Samples are immutable once constructed (arrays are marked read-only), so they
can be shared freely between parallel workers.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

__all__ = [
    "Sample",
    "DoubledSample",
    "NoiseSpec",
    "DataFormatError",
    "double_sample",
    "inject_noise",
    "load_csv",
    "split",
    "k_folds",
    "standardize",
]


class DataFormatError(ValueError):
    """Raised when an input file cannot be parsed into a Sample."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Sample:
    """m labelled observations: an (m, d) matrix and labels in {-1, +1}."""

    observations: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        obs = np.asarray(self.observations, dtype=float)
        lab = np.asarray(self.labels, dtype=float)
        if obs.ndim != 2 or obs.shape[0] < 1 or obs.shape[1] < 1:
            raise ValueError("observations must be a nonempty (m, d) matrix")
        if lab.shape != (obs.shape[0],):
            raise ValueError("labels must be a length-m vector")
        if not np.all(np.isfinite(obs)):
            raise ValueError("observations must be finite")
        if not np.all(np.isin(lab, (-1.0, 1.0))):
            raise ValueError("labels must lie in {-1, +1}")
        object.__setattr__(self, "observations", _freeze(obs))
        object.__setattr__(self, "labels", _freeze(lab))

    @property
    def m(self) -> int:
        return self.observations.shape[0]

    @property
    def d(self) -> int:
        return self.observations.shape[1]

    @property
    def feature_bound(self) -> float:
        """X = max row L2 norm."""
        return float(np.linalg.norm(self.observations, axis=1).max())

    def subset(self, idx) -> "Sample":
        return Sample(self.observations[idx], self.labels[idx])


@dataclass(frozen=True)
class DoubledSample:
    """Each observation twice with opposite signs; carries no label information.

    Row i and row m + i hold the same observation with signs +1 and -1.
    """

    observations: np.ndarray
    signs: np.ndarray

    def __post_init__(self):
        obs = np.asarray(self.observations, dtype=float)
        sg = np.asarray(self.signs, dtype=float)
        n = obs.shape[0]
        if n % 2 != 0:
            raise ValueError("doubled sample must have an even number of rows")
        m = n // 2
        if not (
            np.array_equal(obs[:m], obs[m:]) and np.all(sg[:m] == 1.0) and np.all(sg[m:] == -1.0)
        ):
            raise ValueError("rows must pair identical observations with opposite signs")
        object.__setattr__(self, "observations", _freeze(obs))
        object.__setattr__(self, "signs", _freeze(sg))

    @property
    def n_rows(self) -> int:
        return self.observations.shape[0]

    @property
    def d(self) -> int:
        return self.observations.shape[1]


@dataclass(frozen=True)
class NoiseSpec:
    """Class-conditional flip rates, each in [0, 1/2)."""

    p_plus: float
    p_minus: float

    def __post_init__(self):
        for p in (self.p_plus, self.p_minus):
            if not (0.0 <= p < 0.5):
                raise ValueError("flip rates must lie in [0, 0.5)")

    @property
    def total(self) -> float:
        return self.p_plus + self.p_minus


def double_sample(s: Sample) -> DoubledSample:
    """Build the label-free doubled set: every observation with both signs."""
    obs = np.vstack([s.observations, s.observations])
    signs = np.concatenate([np.ones(s.m), -np.ones(s.m)])
    return DoubledSample(obs, signs)


def inject_noise(s: Sample, n: NoiseSpec, seed: int) -> Sample:
    """Flip each label independently with its class-conditional rate.

    Positives flip with probability p_plus, negatives with p_minus; the flip
    is independent of the observation.  Deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    u = rng.random(s.m)
    rate = np.where(s.labels > 0, n.p_plus, n.p_minus)
    flipped = np.where(u < rate, -s.labels, s.labels)
    return Sample(s.observations, flipped)


def _parse_labels(raw: np.ndarray) -> np.ndarray:
    vals = set(np.unique(raw).tolist())
    if vals <= {-1.0, 1.0}:
        return raw
    if vals <= {0.0, 1.0}:
        return np.where(raw == 0.0, -1.0, 1.0)
    raise DataFormatError(f"label values must be in {{-1,+1}} or {{0,1}}, got {sorted(vals)}")


def load_csv(
    path,
    label_column: Union[int, str] = -1,
    standardize_features: bool = False,
) -> Sample:
    """Read a numeric CSV into a Sample.

    A header row is auto-detected (first row with any non-numeric cell);
    ``label_column`` selects the label field by index or, with a header,
    by name.  Labels in {0, 1} are mapped to {-1, +1}.  Any non-numeric or
    missing value elsewhere is an error.
    """
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise DataFormatError(f"empty file: {path}")

    def _numeric(row):
        try:
            return [float(cell) for cell in row]
        except ValueError:
            return None

    header = None
    first = _numeric(rows[0])
    if first is None:
        header = [cell.strip() for cell in rows[0]]
        rows = rows[1:]
        if not rows:
            raise DataFormatError(f"no data rows in {path}")

    if isinstance(label_column, str):
        if header is None:
            raise DataFormatError("label column given by name but the file has no header")
        try:
            label_idx = header.index(label_column)
        except ValueError:
            raise DataFormatError(f"missing label column {label_column!r}") from None
    else:
        label_idx = label_column

    parsed = []
    for lineno, row in enumerate(rows, start=1):
        vals = _numeric(row)
        if vals is None:
            raise DataFormatError(f"non-numeric cell on data row {lineno}")
        parsed.append(vals)
    data = np.asarray(parsed, dtype=float)
    if not np.all(np.isfinite(data)):
        raise DataFormatError("file contains NaN or infinite values")

    ncol = data.shape[1]
    label_idx = label_idx % ncol
    if not (0 <= label_idx < ncol) or ncol < 2:
        raise DataFormatError("label column out of range")
    labels = _parse_labels(data[:, label_idx])
    feats = np.delete(data, label_idx, axis=1)
    if standardize_features:
        feats = _standardize_matrix(feats, *(_fit_standardizer(feats)))
    return Sample(feats, labels)


def _fit_standardizer(x: np.ndarray):
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    return mean, std


def _standardize_matrix(x: np.ndarray, mean: np.ndarray, std: np.ndarray) -> np.ndarray:
    return (x - mean) / std


def standardize(train: Sample, test: Optional[Sample] = None):
    """Zero-mean unit-variance features, with statistics fit on train only."""
    mean, std = _fit_standardizer(train.observations)
    train_std = Sample(_standardize_matrix(train.observations, mean, std), train.labels)
    if test is None:
        return train_std
    test_std = Sample(_standardize_matrix(test.observations, mean, std), test.labels)
    return train_std, test_std


def split(s: Sample, test_fraction: float, seed: int) -> tuple[Sample, Sample]:
    """One random disjoint (train, test) split, deterministic per seed."""
    if not (0.0 < test_fraction < 1.0):
        raise ValueError("test_fraction must lie in (0, 1)")
    n_test = int(round(s.m * test_fraction))
    if n_test < 1 or s.m - n_test < 1:
        raise ValueError("split would leave an empty train or test set")
    perm = np.random.default_rng(seed).permutation(s.m)
    return s.subset(perm[n_test:]), s.subset(perm[:n_test])


def k_folds(s: Sample, k: int, seed: int) -> list[tuple[Sample, Sample]]:
    """k disjoint (train, validation) folds covering the sample."""
    if not (2 <= k <= s.m):
        raise ValueError("need 2 <= k <= m folds")
    perm = np.random.default_rng(seed).permutation(s.m)
    folds = np.array_split(perm, k)
    out = []
    for i in range(k):
        val_idx = folds[i]
        train_idx = np.concatenate([folds[j] for j in range(k) if j != i])
        out.append((s.subset(train_idx), s.subset(val_idx)))
    return out
