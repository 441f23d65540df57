"""Worker pool sizing for the numba kernels.

numba fixes the size of its thread pool when it is first imported, so the
ceiling has to be settled here, before any kernel module imports numba.
``PARLOGREG_THREADS`` selects the default number of active workers.
"""
import os

ENV_VAR = "PARLOGREG_THREADS"


def _env_threads():
    raw = os.environ.get(ENV_VAR)
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_VAR} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{ENV_VAR} must be a positive integer, got {raw!r}")
    return n


def hardware_threads():
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def default_threads():
    return _env_threads() or hardware_threads()


if "NUMBA_NUM_THREADS" not in os.environ:
    os.environ["NUMBA_NUM_THREADS"] = str(max(hardware_threads(), default_threads()))

import numba  # noqa: E402

# tbb may be present but too old; omp is thread-safe and always shipped with numba wheels
numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]


def max_threads():
    return numba.config.NUMBA_NUM_THREADS


def set_threads(n):
    """Cap the number of workers used by subsequent kernel calls."""
    n = int(n)
    if n < 1:
        raise ValueError("thread count must be >= 1")
    if n > max_threads():
        raise ValueError(
            f"requested {n} threads but the pool was created with {max_threads()}; "
            f"set {ENV_VAR} or NUMBA_NUM_THREADS before importing parlogreg"
        )
    numba.set_num_threads(n)


def get_threads():
    return numba.get_num_threads()


set_threads(min(default_threads(), max_threads()))
