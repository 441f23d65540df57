"""Logistic regression: predictor, loss, gradient and the two trainers.

Both trainers run full-batch gradient descent on the mean negative
log-likelihood, ``w <- w - alpha * grad``, and stop as soon as the gradient
at the current weights has Euclidean norm ``<= epsilon``. The check happens
before each update, so a converged result's weights are exactly the point
whose gradient passed the test.

``fit_sequential`` is a single-threaded numpy implementation.
``fit_parallel`` performs the same iteration using only the kernels in
:mod:`parlogreg.kernels` on preallocated work buffers.
"""
from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from threadpoolctl import threadpool_limits

from . import kernels
from .errors import DivergenceError, ShapeError
from .kernels.parallel import SIGMOID_CEIL, SIGMOID_FLOOR


class Backend(str, enum.Enum):
    SEQUENTIAL = "sequential"
    PARALLEL = "parallel"


@dataclass(frozen=True)
class LabeledDataset:
    """Feature matrix ``X`` (m x n) with binary labels ``y`` (length m)."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.ascontiguousarray(self.X, dtype=np.float64)
        y = np.ascontiguousarray(self.y, dtype=np.float64).ravel()
        if X.ndim != 2:
            raise ShapeError(f"X must be 2-D, got shape {X.shape}")
        if X.shape[0] != y.shape[0]:
            raise ShapeError(f"X has {X.shape[0]} rows but y has {y.shape[0]} labels")
        if not np.isfinite(X).all():
            raise ValueError("X contains NaN or Inf")
        if not np.isin(y, (0.0, 1.0)).all():
            raise ValueError("labels must be exactly 0 or 1")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n_samples(self):
        return self.X.shape[0]

    @property
    def n_features(self):
        return self.X.shape[1]

    def __len__(self):
        return self.n_samples

    def take(self, idx):
        return LabeledDataset(self.X[idx], self.y[idx])


@dataclass(frozen=True)
class TrainConfig:
    alpha: float = 0.1
    epsilon: float = 0.01
    max_iters: int = 10_000
    backend: Backend = Backend.PARALLEL
    init: Optional[np.ndarray] = None  # None means the zero vector
    fit_intercept: bool = True
    ordered_reduction: bool = True
    track_loss: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be a positive finite number, got {self.alpha}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError(f"max_iters must be an integer >= 1, got {self.max_iters}")
        object.__setattr__(self, "backend", Backend(self.backend))
        if self.init is not None:
            object.__setattr__(self, "init", kernels.row_vector(self.init))

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "epsilon": self.epsilon,
            "max_iters": int(self.max_iters),
            "backend": self.backend.value,
            "init": None if self.init is None else self.init.tolist(),
            "fit_intercept": self.fit_intercept,
            "ordered_reduction": self.ordered_reduction,
            "track_loss": self.track_loss,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass
class FitResult:
    weights: np.ndarray
    iterations: int
    final_grad_norm: float
    converged: bool
    wall_time: float
    loss_trace: list = field(default_factory=list)
    fit_intercept: bool = True
    backend: Backend = Backend.PARALLEL

    def design(self, X):
        return add_intercept(X) if self.fit_intercept else np.asarray(X, dtype=np.float64)

    def predict_proba(self, X):
        return predict_proba(self.weights, self.design(X))

    def predict(self, X, threshold=0.5):
        return predict_label(self.weights, self.design(X), threshold)


def add_intercept(X):
    """Append a constant-1 column; the bias becomes the last weight."""
    X = np.asarray(X, dtype=np.float64)
    return np.hstack([X, np.ones((X.shape[0], 1))])


def sigmoid(z):
    """Overflow-safe logistic function, clamped strictly inside (0, 1)."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return np.clip(out, SIGMOID_FLOOR, SIGMOID_CEIL, out=out)


def _check_w(w, X):
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 1 or X.ndim != 2 or w.shape[0] != X.shape[1]:
        raise ShapeError(f"weights of length {w.shape} do not match a {X.shape} matrix")
    return w


def predict_proba(w, X):
    """``P(y=1 | x)`` for every row of ``X``."""
    X = np.asarray(X, dtype=np.float64)
    w = _check_w(w, X)
    return sigmoid(X @ w)


def predict_label(w, X, threshold=0.5):
    """Hard 0/1 labels; a probability equal to ``threshold`` maps to 1."""
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    return (predict_proba(w, X) >= threshold).astype(np.float64)


def _nll_from_logits(z, y):
    # -[y log s(z) + (1-y) log(1 - s(z))] == log(1 + e^z) - y z
    return float(np.maximum(np.logaddexp(0.0, z) - y * z, 0.0).sum())


def negative_log_likelihood(w, dataset):
    """Summed negative log-likelihood (non-negative, unaveraged)."""
    w = _check_w(w, dataset.X)
    return _nll_from_logits(dataset.X @ w, dataset.y)


def gradient(w, dataset):
    """Gradient of ``negative_log_likelihood / m`` with respect to ``w``."""
    w = _check_w(w, dataset.X)
    err = sigmoid(dataset.X @ w) - dataset.y
    return (err @ dataset.X) / dataset.n_samples


def _prepare(dataset, config):
    X = add_intercept(dataset.X) if config.fit_intercept else np.array(dataset.X, dtype=np.float64)
    n = X.shape[1]
    if config.init is None:
        w = np.zeros(n)
    else:
        if config.init.shape[0] != n:
            raise ShapeError(f"initial weights have length {config.init.shape[0]}, expected {n}")
        w = config.init.copy()
    return X, w


def _check_finite(it, loss, w):
    if not math.isfinite(loss):
        raise DivergenceError(it, f"loss is {loss}; the learning rate is probably too large")
    if not np.isfinite(w).all():
        raise DivergenceError(it, "weights became non-finite; the learning rate is probably too large")


def fit_sequential(dataset, config, callback: Optional[Callable[[int, np.ndarray], None]] = None):
    """Reference trainer: plain numpy on one thread.

    ``callback(k, w)`` is invoked after the k-th update with the new weights.
    """
    X, w = _prepare(dataset, config)
    Y = dataset.y
    m = X.shape[0]
    trace = []
    t0 = time.perf_counter()
    with threadpool_limits(limits=1), np.errstate(over="ignore", invalid="ignore"):
        it = 0
        while True:
            z = X @ w
            err = sigmoid(z) - Y
            grad = (err @ X) / m
            grad_norm = math.sqrt(float(grad @ grad))
            if grad_norm <= config.epsilon or it >= config.max_iters:
                break
            loss = _nll_from_logits(z, Y) if config.track_loss else 0.0
            w = w - config.alpha * grad
            it += 1
            _check_finite(it, loss, w)
            if config.track_loss:
                trace.append(loss)
            if callback is not None:
                callback(it, w)
    return FitResult(
        weights=w,
        iterations=it,
        final_grad_norm=grad_norm,
        converged=grad_norm <= config.epsilon,
        wall_time=time.perf_counter() - t0,
        loss_trace=trace,
        fit_intercept=config.fit_intercept,
        backend=Backend.SEQUENTIAL,
    )


def fit_parallel(dataset, config, callback: Optional[Callable[[int, np.ndarray], None]] = None):
    """Kernel-composed trainer.

    Per iteration::

        logits  = col_sum(w-scaled rows of X^T)      # X w
        y_pred  = sigmoid(logits)
        y_pred -= Y                                  # residual
        grad    = col_sum(residual-scaled rows of X) / m
        ||grad||^2 = norm2(grad)
        w      -= alpha * grad

    The kernels scale rows in place, so each product is written into a
    scratch matrix and ``X`` itself is never modified.
    """
    X, w = _prepare(dataset, config)
    Y = np.ascontiguousarray(dataset.y)
    m, n = X.shape
    ordered = config.ordered_reduction
    trace = []

    t0 = time.perf_counter()
    XT = np.ascontiguousarray(X.T)
    scratch_t = np.empty_like(XT)
    scratch = np.empty_like(X)
    logits = np.zeros(m)
    y_pred = np.empty(m)
    grad = np.empty(n)
    step = np.empty(n)

    it = 0
    with np.errstate(over="ignore", invalid="ignore"):
        while True:
            kernels.vector_matrix_mul(w, XT, out=scratch_t)
            kernels.matrix_col_sum(scratch_t, logits, ordered=ordered)
            kernels.sigmoid_map(logits, y_pred)
            kernels.subtract(Y, y_pred)
            kernels.vector_matrix_mul(y_pred, X, out=scratch)
            kernels.matrix_col_sum(scratch, grad, ordered=ordered)
            grad /= m
            grad_norm = math.sqrt(kernels.norm2(grad, 0.0, ordered=ordered))
            if grad_norm <= config.epsilon or it >= config.max_iters:
                break
            loss = _nll_from_logits(logits, Y) if config.track_loss else 0.0
            np.multiply(grad, config.alpha, out=step)
            kernels.subtract(step, w)
            it += 1
            _check_finite(it, loss, w)
            if config.track_loss:
                trace.append(loss)
            if callback is not None:
                callback(it, w)
    return FitResult(
        weights=w,
        iterations=it,
        final_grad_norm=grad_norm,
        converged=grad_norm <= config.epsilon,
        wall_time=time.perf_counter() - t0,
        loss_trace=trace,
        fit_intercept=config.fit_intercept,
        backend=Backend.PARALLEL,
    )


def fit(dataset, config, callback=None):
    """Dispatch to the trainer named by ``config.backend``."""
    if config.backend is Backend.SEQUENTIAL:
        return fit_sequential(dataset, config, callback)
    return fit_parallel(dataset, config, callback)
