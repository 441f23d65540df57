"""Confusion counts, f1 and wall-clock timing of fits."""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import ShapeError


@dataclass(frozen=True)
class EvalReport:
    tp: int
    fp: int
    tn: int
    fn: int
    precision: float
    recall: float
    f1: float
    wall_time: Optional[float] = None
    config_echo: Optional[dict] = None

    @property
    def n_samples(self):
        return self.tp + self.fp + self.tn + self.fn

    def to_dict(self):
        return asdict(self)


def _binary(a, name):
    a = np.asarray(a, dtype=np.float64).ravel()
    if not np.isin(a, (0.0, 1.0)).all():
        raise ValueError(f"{name} must contain only 0 and 1")
    return a


def confusion(y_true, y_pred):
    """Return ``(tp, fp, tn, fn)`` with label 1 as the positive class."""
    t = _binary(y_true, "y_true")
    p = _binary(y_pred, "y_pred")
    if t.shape != p.shape:
        raise ShapeError(f"y_true has {t.size} entries, y_pred has {p.size}")
    t = t.astype(bool)
    p = p.astype(bool)
    return (
        int(np.count_nonzero(t & p)),
        int(np.count_nonzero(~t & p)),
        int(np.count_nonzero(~t & ~p)),
        int(np.count_nonzero(t & ~p)),
    )


def f1_score(tp, fp, fn):
    """``2tp / (2tp + fp + fn)``, or 0.0 when there is nothing to score."""
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else 0.0


def precision_recall(tp, fp, fn):
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return precision, recall


def evaluate(y_true, y_pred, wall_time=None, config=None):
    tp, fp, tn, fn = confusion(y_true, y_pred)
    precision, recall = precision_recall(tp, fp, fn)
    return EvalReport(tp, fp, tn, fn, precision, recall, f1_score(tp, fp, fn),
                      wall_time=wall_time, config_echo=config)


def timed(fn, *args, **kwargs):
    """Call ``fn`` and return ``(result, seconds)`` measured on a monotonic clock."""
    t0 = time.perf_counter()
    result = fn(*args, **kwargs)
    return result, time.perf_counter() - t0
