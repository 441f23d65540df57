"""Exit criteria for the package, one test per criterion.

Each test prints a ``[PASS]``/``[FAIL]`` line; the lines are also collected
into a section of the pytest terminal summary.

The HIGGS criterion looks for the dataset at ``$PARLOGREG_HIGGS`` or at
``data/HIGGS.csv.gz`` / ``data/HIGGS.csv`` in the repository and is skipped
when neither exists.
"""
import json
import math
import os
import statistics
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from helpers import central_difference, random_problem, relative_error
from parlogreg import _threads, kernels
from parlogreg.data import DatasetSpec, make_blobs, make_random
from parlogreg.kernels import scalar
from parlogreg.metrics import confusion, f1_score
from parlogreg.model import (
    LabeledDataset,
    TrainConfig,
    add_intercept,
    fit_parallel,
    fit_sequential,
    gradient,
    negative_log_likelihood,
)

ROOT = Path(__file__).resolve().parents[1]
TRAINERS = {"sequential": fit_sequential, "parallel": fit_parallel}

# (dataset, config, FitResult) for every fit made by criteria 3-6
FITS = []


def record(num, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {title} -- {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def higgs_path():
    candidates = [os.environ.get("PARLOGREG_HIGGS"), ROOT / "data" / "HIGGS.csv.gz",
                  ROOT / "data" / "HIGGS.csv"]
    for c in candidates:
        if c and Path(c).is_file():
            return Path(c)
    return None


def f1_on(result, dataset):
    tp, fp, _, fn = confusion(dataset.y, result.predict(dataset.X))
    return f1_score(tp, fp, fn)


# --- 1 ---------------------------------------------------------------------

def _kernel_cases(rng):
    m, n = (int(k) for k in rng.integers(1, 65, size=2))
    M = rng.standard_normal((m, n)) * 10.0 ** rng.integers(-3, 4)
    v = rng.standard_normal(m)
    u = rng.standard_normal(m) * 50
    r = rng.standard_normal(n)
    return m, n, M, v, u, r


def test_criterion_1_kernel_oracle_equivalence():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    mismatches = {k: 0 for k in ("vector_matrix_mul", "matrix_col_sum", "norm2", "subtract", "sigmoid_map")}
    for _ in range(200):
        m, n, M, v, u, r = _kernel_cases(rng)

        a, b = M.copy(), M.copy()
        kernels.vector_matrix_mul(v, a)
        scalar.vector_matrix_mul(v, b)
        mismatches["vector_matrix_mul"] += not np.array_equal(a, b)

        a, b = np.full(n, np.nan), np.full(n, np.nan)
        kernels.matrix_col_sum(M, a)
        scalar.matrix_col_sum(M, b)
        mismatches["matrix_col_sum"] += not np.array_equal(a, b)

        acc = float(rng.random())
        mismatches["norm2"] += kernels.norm2(r, acc) != scalar.norm2(r, acc)

        a, b = u.copy(), u.copy()
        kernels.subtract(v, a)
        scalar.subtract(v, b)
        mismatches["subtract"] += not np.array_equal(a, b)

        a, b = np.empty(m), np.empty(m)
        kernels.sigmoid_map(u, a)
        scalar.sigmoid_map(u, b)
        mismatches["sigmoid_map"] += not np.array_equal(a, b)
    elapsed = time.perf_counter() - t0
    ok = not any(mismatches.values()) and elapsed < 10
    record(1, "kernel-oracle equivalence", ok,
           f"200 instances x 5 kernels, mismatches={mismatches}, {elapsed:.2f} s (< 10 s)")


# --- 2 ---------------------------------------------------------------------

def test_criterion_2_gradient_check():
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        w, d = random_problem(rng, m_max=50, n_max=8)
        fd = central_difference(lambda v: negative_log_likelihood(v, d) / d.n_samples, w, h=1e-6)
        worst = max(worst, relative_error(gradient(w, d), fd))
    elapsed = time.perf_counter() - t0
    record(2, "gradient vs central differences", worst <= 1e-5 and elapsed < 5,
           f"worst relative error {worst:.2e} (<= 1e-5), {elapsed:.2f} s (< 5 s)")


# --- 3 ---------------------------------------------------------------------

def test_criterion_3_backend_equivalence():
    d = make_random(seed=3, m=1000, n=10)
    cfg = TrainConfig(alpha=0.05, epsilon=1e-3)
    t0 = time.perf_counter()
    paths, results = {}, {}
    for name, trainer in TRAINERS.items():
        steps = []
        results[name] = trainer(d, cfg, callback=lambda k, w: steps.append(w.copy()))
        paths[name] = np.array(steps)
        FITS.append((d, cfg, results[name]))
    elapsed = time.perf_counter() - t0
    its = {k: r.iterations for k, r in results.items()}
    same_count = its["sequential"] == its["parallel"] and len(paths["sequential"]) == len(paths["parallel"])
    dev = float(np.abs(paths["sequential"] - paths["parallel"]).max()) if same_count else math.inf
    ok = same_count and dev <= 1e-10 and elapsed < 30
    record(3, "backend equivalence", ok,
           f"iterations {its}, max per-iteration deviation {dev:.2e} (<= 1e-10), {elapsed:.2f} s (< 30 s)")


# --- 4 ---------------------------------------------------------------------

def test_criterion_4_blob_convergence():
    d = make_blobs(seed=7, m=200, n=2, separation=8)
    cfg = TrainConfig(alpha=0.1, epsilon=0.01, max_iters=5000)
    t0 = time.perf_counter()
    summary, ok = {}, True
    for name, trainer in TRAINERS.items():
        r = trainer(d, cfg)
        FITS.append((d, cfg, r))
        f1 = f1_on(r, d)
        summary[name] = (r.converged, r.iterations, f1)
        ok &= r.converged and r.iterations <= 5000 and f1 == 1.0
    elapsed = time.perf_counter() - t0
    record(4, "blob convergence", ok and elapsed < 10,
           f"(converged, iterations, train f1) = {summary}, {elapsed:.2f} s (< 10 s)")


# --- 5 ---------------------------------------------------------------------

SPEED_ROWS, SPEED_FEATURES, SPEED_REPS, SPEED_ITERS = 500_000, 28, 3, 50


def test_criterion_5_parallel_speedup():
    threads = min(max(4, _threads.hardware_threads()), _threads.max_threads())
    previous = _threads.get_threads()
    _threads.set_threads(threads)
    try:
        kernels.warmup()
        d = make_random(seed=5, m=SPEED_ROWS, n=SPEED_FEATURES)
        cfg = TrainConfig(alpha=0.1, epsilon=0.01, max_iters=SPEED_ITERS)
        t0 = time.perf_counter()
        medians = {}
        for name, trainer in TRAINERS.items():
            times = []
            for _ in range(SPEED_REPS):
                r = trainer(d, cfg)
                times.append(r.wall_time)
            FITS.append((d, cfg, r))
            medians[name] = statistics.median(times)
        elapsed = time.perf_counter() - t0
    finally:
        _threads.set_threads(previous)
    ok = threads >= 4 and medians["parallel"] < medians["sequential"] and elapsed < 600
    record(5, "parallel speedup", ok,
           f"{SPEED_ROWS}x{SPEED_FEATURES}, {threads} workers on {_threads.hardware_threads()} CPU(s), "
           f"{SPEED_ITERS} iterations, median seconds sequential={medians['sequential']:.3f} "
           f"parallel={medians['parallel']:.3f} (parallel must be lower), {elapsed:.1f} s (< 600 s)")


# --- 6 ---------------------------------------------------------------------

def test_criterion_6_higgs_band():
    path = higgs_path()
    if path is None:
        ACCEPTANCE_LINES.append("[SKIP] criterion 6: HIGGS desk-scale band -- dataset file not found")
        pytest.skip("HIGGS file not found; set PARLOGREG_HIGGS")
    spec = DatasetSpec(source=str(path), seed=0, test_fraction=0.2, standardize=True,
                       limit_rows=100_000)
    t0 = time.perf_counter()
    train, test, _, _ = spec.prepare()
    cfg = TrainConfig(alpha=0.1, epsilon=0.01, max_iters=10_000)
    scores, ok = {}, train.n_features == 28
    for name, trainer in TRAINERS.items():
        r = trainer(train, cfg)
        FITS.append((train, cfg, r))
        scores[name] = round(f1_on(r, test), 4)
        ok &= 0.55 <= scores[name] <= 0.75
    elapsed = time.perf_counter() - t0
    record(6, "HIGGS desk-scale band", ok and elapsed < 900,
           f"test f1 {scores} (in [0.55, 0.75]), {elapsed:.1f} s (< 900 s)")


# --- 7 ---------------------------------------------------------------------

def test_criterion_7_stopping_soundness():
    checked, worst_excess = 0, -math.inf
    for d, cfg, r in FITS:
        if not r.converged:
            continue
        design = LabeledDataset(add_intercept(d.X) if cfg.fit_intercept else d.X, d.y)
        excess = float(np.linalg.norm(gradient(r.weights, design))) - cfg.epsilon
        worst_excess = max(worst_excess, excess)
        checked += 1
    ok = checked > 0 and worst_excess <= 1e-12
    record(7, "stopping soundness", ok,
           f"{checked} converged fits re-checked, max(|grad| - eps) = {worst_excess:.2e} (<= 1e-12)")


# --- 8 ---------------------------------------------------------------------

def test_criterion_8_cli_determinism(tmp_path):
    docs = []
    for k in range(2):
        out = tmp_path / f"run{k}.json"
        proc = subprocess.run(
            [sys.executable, "-m", "parlogreg", "benchmark", "--data", "random",
             "--n-samples", "3000", "--n-features", "12", "--seed", "11", "--reps", "2",
             "--out", str(out)],
            capture_output=True, text=True, timeout=600,
        )
        assert proc.returncode == 0, proc.stderr
        docs.append(json.loads(out.read_text()))
    same = all(
        docs[0]["results"][b]["weights"] == docs[1]["results"][b]["weights"]
        and docs[0]["results"][b]["f1"] == docs[1]["results"][b]["f1"]
        for b in ("sequential", "parallel")
    )
    f1s = {b: docs[0]["results"][b]["f1"] for b in ("sequential", "parallel")}
    record(8, "CLI determinism", same, f"two benchmark runs, bit-identical weights and f1: {same}, f1 {f1s}")
