import numpy as np

from parlogreg.model import LabeledDataset


def central_difference(f, w, h=1e-6):
    g = np.empty_like(w)
    for k in range(w.size):
        e = np.zeros_like(w)
        e[k] = h
        g[k] = (f(w + e) - f(w - e)) / (2 * h)
    return g


def relative_error(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


def perceptron_separates(X, y, epochs=1000):
    """True once a perceptron pass (with bias) makes no mistakes."""
    Xb = np.hstack([X, np.ones((X.shape[0], 1))])
    s = 2 * y - 1
    w = np.zeros(Xb.shape[1])
    for _ in range(epochs):
        mistakes = 0
        for xi, si in zip(Xb, s):
            if si * (xi @ w) <= 0:
                w += si * xi
                mistakes += 1
        if mistakes == 0:
            return True
    return False


def random_problem(rng, m_max=50, n_max=8):
    m = int(rng.integers(2, m_max + 1))
    n = int(rng.integers(1, n_max + 1))
    X = rng.standard_normal((m, n))
    y = (rng.random(m) < 0.5).astype(float)
    w = rng.standard_normal(n)
    return w, LabeledDataset(X, y)
