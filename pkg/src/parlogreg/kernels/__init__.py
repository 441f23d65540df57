"""Data-parallel kernels plus scalar oracles with matching signatures."""
from .. import _threads  # noqa: F401  (sizes the numba pool before import)
from . import scalar
from .parallel import (
    matrix_col_sum,
    norm2,
    sigmoid_map,
    subtract,
    vector_matrix_mul,
    warmup,
)
from .types import dense_matrix, row_vector

__all__ = [
    "dense_matrix",
    "matrix_col_sum",
    "norm2",
    "row_vector",
    "scalar",
    "sigmoid_map",
    "subtract",
    "vector_matrix_mul",
    "warmup",
]
