"""Plain-Python double-loop versions of the kernels.

Same signatures and in-place semantics as :mod:`parlogreg.kernels.parallel`,
written as literally as possible so they can serve as test oracles.
"""
import math

from ..errors import ShapeError
from .parallel import SIGMOID_CEIL, SIGMOID_FLOOR


def vector_matrix_mul(v, M, out=None):
    m, n = M.shape
    if len(v) != m:
        raise ShapeError(f"vector length {len(v)} != matrix rows {m}")
    if out is None:
        out = M
    for i in range(m):
        for j in range(n):
            out[i, j] = float(v[i]) * float(M[i, j])
    return out


def matrix_col_sum(M, res, ordered=True):
    m, n = M.shape
    if len(res) != n:
        raise ShapeError(f"result length {len(res)} != matrix columns {n}")
    for j in range(n):
        acc = 0.0
        for i in range(m):
            acc = acc + float(M[i, j])
        res[j] = acc
    return res


def norm2(v, acc=0.0, ordered=True):
    acc = float(acc)
    for x in v:
        acc = acc + float(x) * float(x)
    return acc


def subtract(vec1, res2):
    if len(vec1) != len(res2):
        raise ShapeError(f"lengths differ ({len(vec1)} vs {len(res2)})")
    for i in range(len(res2)):
        res2[i] = float(res2[i]) - float(vec1[i])
    return res2


def sigmoid_map(res, y_pred):
    if len(res) != len(y_pred):
        raise ShapeError(f"lengths differ ({len(res)} vs {len(y_pred)})")
    for i in range(len(res)):
        x = float(res[i])
        if x >= 0.0:
            y = 1.0 / (1.0 + math.exp(-x))
        else:
            e = math.exp(x)
            y = e / (1.0 + e)
        y_pred[i] = min(max(y, SIGMOID_FLOOR), SIGMOID_CEIL)
    return y_pred
