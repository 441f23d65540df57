"""Gradient-descent logistic regression with sequential and kernel-parallel trainers.

Submodules are imported lazily so that the command line can size the
worker pool before numba starts.
"""
import importlib

__version__ = "0.1.0"

_LAZY = {
    "LabeledDataset": "model",
    "TrainConfig": "model",
    "FitResult": "model",
    "Backend": "model",
    "fit": "model",
    "fit_sequential": "model",
    "fit_parallel": "model",
    "predict_proba": "model",
    "predict_label": "model",
    "negative_log_likelihood": "model",
    "gradient": "model",
    "load_csv": "data",
    "make_blobs": "data",
    "make_random": "data",
    "train_test_split": "data",
    "standardize": "data",
    "confusion": "metrics",
    "f1_score": "metrics",
    "evaluate": "metrics",
    "timed": "metrics",
    "set_threads": "_threads",
    "get_threads": "_threads",
}

__all__ = sorted(_LAZY)


def __getattr__(name):
    if name in _LAZY:
        module = importlib.import_module(f".{_LAZY[name]}", __name__)
        return getattr(module, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
