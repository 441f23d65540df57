"""Dataset loading, synthetic generators, splitting and standardization.

CSV layout follows the public HIGGS file: no header, label in the first
column, features after it. Files ending in ``.gz``, ``.bz2`` or ``.xz`` are
decompressed transparently.
"""
from __future__ import annotations

import bz2
import gzip
import lzma
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DataFormatError
from .model import LabeledDataset

HIGGS_FEATURES = 28

_OPENERS = {".gz": gzip.open, ".gzip": gzip.open, ".bz2": bz2.open, ".xz": lzma.open}


def _open_text(path):
    opener = _OPENERS.get(Path(path).suffix.lower(), open)
    return opener(path, "rt", encoding="ascii", newline="")


def read_rows(path, limit_rows=None):
    """Parse a headerless numeric CSV into a 2-D float64 array.

    Blank lines are skipped; ragged or non-numeric rows raise
    :class:`DataFormatError` with the offending line number. Returns ``None``
    for a file without data rows.
    """
    if limit_rows is not None and limit_rows < 1:
        raise ValueError("limit_rows must be >= 1")
    rows = []
    width = None
    try:
        with _open_text(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                if limit_rows is not None and len(rows) >= limit_rows:
                    break
                line = line.strip()
                if not line:
                    continue
                fields = line.split(",")
                if width is None:
                    width = len(fields)
                elif len(fields) != width:
                    raise DataFormatError(
                        f"{path}:{lineno}: expected {width} columns, found {len(fields)}"
                    )
                try:
                    rows.append([float(f) for f in fields])
                except ValueError as exc:
                    raise DataFormatError(f"{path}:{lineno}: {exc}") from None
    except (OSError, EOFError, UnicodeDecodeError) as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc
    if not rows:
        return None
    arr = np.array(rows, dtype=np.float64)
    if not np.isfinite(arr).all():
        bad = int(np.argwhere(~np.isfinite(arr))[0, 0])
        raise DataFormatError(f"{path}: non-finite value in data row {bad + 1}")
    return arr


def load_csv(path, limit_rows=None):
    """Read a headerless ``label,f1,...,fk`` CSV into a :class:`LabeledDataset`.

    At most ``limit_rows`` data rows are read, in file order.
    """
    arr = read_rows(path, limit_rows)
    if arr is None:
        raise DataFormatError(f"{path}: no data rows")
    if arr.shape[1] < 2:
        raise DataFormatError(f"{path}: need a label column and at least one feature")
    bad = np.flatnonzero((arr[:, 0] != 0.0) & (arr[:, 0] != 1.0))
    if bad.size:
        raise DataFormatError(
            f"{path}: label {arr[bad[0], 0]!r} in data row {bad[0] + 1} is not 0 or 1"
        )
    return LabeledDataset(arr[:, 1:], arr[:, 0])


def write_csv(dataset, path):
    """Write ``dataset`` in the layout :func:`load_csv` reads.

    ``repr`` of a float round-trips exactly, so reloading is bit-identical.
    """
    with open(path, "w", encoding="ascii") as fh:
        for label, row in zip(dataset.y, dataset.X):
            fh.write(",".join([repr(float(label))] + [repr(float(x)) for x in row]))
            fh.write("\n")


def make_blobs(seed, m, n, separation):
    """Two unit-variance Gaussian clusters centred at -sep/2 and +sep/2 on every axis."""
    if m < 2 or n < 1 or not separation > 0:
        raise ValueError("make_blobs needs m >= 2, n >= 1 and separation > 0")
    rng = np.random.default_rng(seed)
    m0 = m // 2
    m1 = m - m0
    half = separation / 2.0
    X = np.vstack([
        rng.standard_normal((m0, n)) - half,
        rng.standard_normal((m1, n)) + half,
    ])
    y = np.concatenate([np.zeros(m0), np.ones(m1)])
    order = rng.permutation(m)
    return LabeledDataset(X[order], y[order])


def make_random(seed, m, n):
    """Standard-normal features with labels drawn from a random logistic model."""
    if m < 1 or n < 1:
        raise ValueError("make_random needs m >= 1 and n >= 1")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((m, n))
    w_true = rng.standard_normal(n) / math.sqrt(n)
    p = 1.0 / (1.0 + np.exp(-(X @ w_true)))
    y = (rng.random(m) < p).astype(np.float64)
    return LabeledDataset(X, y)


def train_test_split(dataset, test_fraction, seed):
    """Shuffle rows with a seeded PRNG and cut off the last ``floor(m*f)`` as test."""
    if not 0.0 <= test_fraction < 1.0:
        raise ValueError(f"test_fraction must lie in [0, 1), got {test_fraction}")
    m = dataset.n_samples
    n_test = int(math.floor(m * test_fraction + 1e-9))
    perm = np.random.default_rng(seed).permutation(m)
    return dataset.take(perm[: m - n_test]), dataset.take(perm[m - n_test:])


def standardize(train, test=None):
    """Zero-mean, unit-variance columns using population statistics of ``train``.

    Constant columns become all zeros and get a recorded std of 1. Returns
    ``(train, test, means, stds)``; ``test`` may be ``None``.
    """
    if train.n_samples < 1:
        raise ValueError("cannot standardize an empty training set")
    means = train.X.mean(axis=0)
    stds = train.X.std(axis=0)
    constant = np.ptp(train.X, axis=0) == 0
    stds[constant] = 1.0
    means[constant] = train.X[0, constant]
    out = [LabeledDataset((train.X - means) / stds, train.y)]
    if test is not None and test.n_samples > 0:
        out.append(LabeledDataset((test.X - means) / stds, test.y))
    else:
        out.append(test)
    return out[0], out[1], means, stds


def apply_standardization(X, means, stds):
    return (np.asarray(X, dtype=np.float64) - means) / stds


@dataclass(frozen=True)
class DatasetSpec:
    """Where the data comes from and how it is prepared.

    ``source`` is ``"blobs"``, ``"random"`` or a CSV path.
    """

    source: str = "blobs"
    seed: int = 0
    n_samples: int = 200
    n_features: int = 2
    separation: float = 8.0
    test_fraction: float = 0.2
    standardize: bool = True
    limit_rows: Optional[int] = None

    def __post_init__(self):
        if not 0.0 <= self.test_fraction < 1.0:
            raise ValueError("test_fraction must lie in [0, 1)")
        if self.limit_rows is not None and self.limit_rows < 1:
            raise ValueError("limit_rows must be >= 1")

    def load(self):
        if self.source == "blobs":
            return make_blobs(self.seed, self.n_samples, self.n_features, self.separation)
        if self.source == "random":
            return make_random(self.seed, self.n_samples, self.n_features)
        return load_csv(self.source, self.limit_rows)

    def prepare(self):
        """Load, split and (optionally) standardize.

        Returns ``(train, test, means, stds)``; the statistics are ``None``
        when standardization is off.
        """
        train, test = train_test_split(self.load(), self.test_fraction, self.seed)
        if not self.standardize:
            return train, test, None, None
        return standardize(train, test)
