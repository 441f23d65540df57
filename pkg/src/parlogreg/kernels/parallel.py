"""Data-parallel building blocks of the gradient-descent trainer.

Each kernel parallelises the loop that carries independent work: rows for
the row scaling and element-wise maps, columns for the column sum. Outputs
are written in place, mirroring the buffer-passing style of device code.

Reductions (``matrix_col_sum``, ``norm2``) run in a fixed accumulation
order by default, which makes them bit-identical to a plain sequential
loop. ``ordered=False`` switches to per-worker partial sums, which is
faster but rounds differently.
"""
import math

import numpy as np
from numba import get_num_threads, njit, prange

from ..errors import ShapeError
from .types import check_matrix, check_vector, check_writable

# sigmoid output is clamped into the open interval (0, 1)
SIGMOID_FLOOR = np.finfo(np.float64).tiny
SIGMOID_CEIL = 1.0 - np.finfo(np.float64).epsneg


@njit(parallel=True, cache=True)
def _scale_rows(v, M, out):
    m, n = M.shape
    for i in prange(m):
        s = v[i]
        for j in range(n):
            out[i, j] = s * M[i, j]


@njit(parallel=True, cache=True)
def _col_sum_ordered(M, res, block):
    m, n = M.shape
    nblocks = (n + block - 1) // block
    for b in prange(nblocks):
        j0 = b * block
        j1 = min(n, j0 + block)
        # private accumulator: no aliasing with M, so the row loop vectorises
        acc = np.zeros(j1 - j0)
        for i in range(m):
            for j in range(j1 - j0):
                acc[j] += M[i, j0 + j]
        for j in range(j1 - j0):
            res[j0 + j] = acc[j]


@njit(parallel=True, cache=True)
def _col_sum_partial(M, res, nchunks):
    m, n = M.shape
    partial = np.zeros((nchunks, n))
    rows = (m + nchunks - 1) // nchunks
    for c in prange(nchunks):
        i0 = c * rows
        i1 = min(m, i0 + rows)
        for i in range(i0, i1):
            for j in range(n):
                partial[c, j] += M[i, j]
    for j in range(n):
        res[j] = 0.0
    for c in range(nchunks):
        for j in range(n):
            res[j] += partial[c, j]


@njit(parallel=True, cache=True)
def _sum_squares_ordered(v, acc):
    n = v.shape[0]
    sq = np.empty(n)
    for i in prange(n):
        sq[i] = v[i] * v[i]
    for i in range(n):
        acc += sq[i]
    return acc


@njit(parallel=True, cache=True)
def _sum_squares_free(v, acc):
    s = 0.0
    for i in prange(v.shape[0]):
        s += v[i] * v[i]
    return acc + s


@njit(parallel=True, cache=True)
def _subtract(vec1, res2):
    for i in prange(res2.shape[0]):
        res2[i] = res2[i] - vec1[i]


@njit(parallel=True, cache=True)
def _sigmoid(res, y_pred, lo, hi):
    for i in prange(res.shape[0]):
        x = res[i]
        if x >= 0.0:
            y = 1.0 / (1.0 + math.exp(-x))
        else:
            e = math.exp(x)
            y = e / (1.0 + e)
        y_pred[i] = min(max(y, lo), hi)


def _col_block(n):
    # one contiguous block per worker: every block streams the whole matrix,
    # so more blocks only add passes. The result does not depend on it.
    return max(1, -(-n // get_num_threads()))


def vector_matrix_mul(v, M, out=None):
    """Scale row ``i`` of ``M`` by ``v[i]``.

    ``M`` is modified in place unless ``out`` (same shape as ``M``) is
    given, in which case the scaled rows go there and ``M`` is left alone.
    Returns the written matrix.
    """
    check_vector(v, "v")
    check_matrix(M, "M")
    if v.shape[0] != M.shape[0]:
        raise ShapeError(
            f"vector_matrix_mul: vector length {v.shape[0]} != matrix rows {M.shape[0]}"
        )
    if out is None:
        check_writable(M, "M")
        out = M
    else:
        check_matrix(out, "out")
        if out.shape != M.shape:
            raise ShapeError(f"vector_matrix_mul: out shape {out.shape} != matrix shape {M.shape}")
    _scale_rows(v, M, out)
    return out


def matrix_col_sum(M, res, ordered=True):
    """Overwrite ``res[j]`` with the sum of column ``j`` of ``M``."""
    check_matrix(M, "M")
    check_vector(res, "res")
    check_writable(res, "res")
    m, n = M.shape
    if res.shape[0] != n:
        raise ShapeError(f"matrix_col_sum: result length {res.shape[0]} != matrix columns {n}")
    if ordered:
        _col_sum_ordered(M, res, _col_block(n))
    else:
        _col_sum_partial(M, res, max(1, min(m, 4 * get_num_threads())))
    return res


def norm2(v, acc=0.0, ordered=True):
    """Return ``acc`` plus the sum of squares of ``v`` (the squared norm)."""
    check_vector(v, "v")
    acc = float(acc)
    if ordered:
        return float(_sum_squares_ordered(v, acc))
    return float(_sum_squares_free(v, acc))


def subtract(vec1, res2):
    """``res2 <- res2 - vec1`` element-wise, in place."""
    check_vector(vec1, "vec1")
    check_vector(res2, "res2")
    check_writable(res2, "res2")
    if vec1.shape[0] != res2.shape[0]:
        raise ShapeError(f"subtract: lengths differ ({vec1.shape[0]} vs {res2.shape[0]})")
    _subtract(vec1, res2)
    return res2


def sigmoid_map(res, y_pred):
    """Write the logistic function of ``res`` into ``y_pred``.

    Uses ``e^x / (1 + e^x)`` for negative inputs so nothing overflows, and
    clamps to ``[tiny, 1 - eps/2]`` so every output stays strictly inside
    (0, 1). ``y_pred`` may alias ``res``.
    """
    check_vector(res, "res")
    check_vector(y_pred, "y_pred")
    check_writable(y_pred, "y_pred")
    if res.shape[0] != y_pred.shape[0]:
        raise ShapeError(f"sigmoid_map: lengths differ ({res.shape[0]} vs {y_pred.shape[0]})")
    _sigmoid(res, y_pred, SIGMOID_FLOOR, SIGMOID_CEIL)
    return y_pred


def warmup():
    """Compile every kernel on a tiny input so later timings exclude JIT cost."""
    M = np.ones((2, 2))
    v = np.ones(2)
    vector_matrix_mul(v, M)
    vector_matrix_mul(v, M, out=np.empty_like(M))
    matrix_col_sum(M, v)
    matrix_col_sum(M, v, ordered=False)
    norm2(v)
    norm2(v, ordered=False)
    subtract(v, v.copy())
    sigmoid_map(v, v.copy())
