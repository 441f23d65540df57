import os

# The numba pool is sized on first import; leave room for multi-worker runs
# even on small machines, and run kernels with several workers by default so
# the parallel partitioning is actually exercised.
os.environ.setdefault("NUMBA_NUM_THREADS", "8")
os.environ.setdefault("PARLOGREG_THREADS", "4")

import pytest  # noqa: E402

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(12345)
