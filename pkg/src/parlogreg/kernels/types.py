"""Constructors and checks for the two array shapes the kernels accept.

Matrices are 2-D row-major float64 arrays; row vectors are 1-D float64
arrays. Finiteness is validated once, at construction, not on every kernel
call.
"""
import numpy as np

from ..errors import ShapeError


def dense_matrix(data):
    """Return a finite, C-contiguous float64 copy of a 2-D array."""
    a = np.array(data, dtype=np.float64, order="C", copy=True)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got {a.ndim} dimension(s)")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ShapeError(f"matrix dimensions must be positive, got {a.shape[0]}x{a.shape[1]}")
    if not np.isfinite(a).all():
        raise ValueError("matrix contains NaN or Inf")
    return a


def row_vector(data):
    """Return a finite float64 copy of a 1-D vector (a 1xk row accepted too)."""
    a = np.array(data, dtype=np.float64, copy=True)
    if a.ndim == 2 and a.shape[0] == 1:
        a = a[0].copy()
    if a.ndim != 1:
        raise ShapeError(f"expected a row vector, got shape {a.shape}")
    if a.size < 1:
        raise ShapeError("row vector must have positive length")
    if not np.isfinite(a).all():
        raise ValueError("vector contains NaN or Inf")
    return a


def check_matrix(M, name="M"):
    if not isinstance(M, np.ndarray) or M.ndim != 2:
        raise ShapeError(f"{name} must be a 2-D ndarray")
    if M.dtype != np.float64 or not M.flags.c_contiguous:
        raise TypeError(f"{name} must be a C-contiguous float64 array")


def check_vector(v, name="v"):
    if not isinstance(v, np.ndarray) or v.ndim != 1:
        raise ShapeError(f"{name} must be a 1-D ndarray")
    if v.dtype != np.float64:
        raise TypeError(f"{name} must be float64")


def check_writable(a, name):
    if not a.flags.writeable:
        raise ValueError(f"{name} is read-only but is written in place")
