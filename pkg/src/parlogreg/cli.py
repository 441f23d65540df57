"""Command line entry point: ``parlogreg {train,benchmark,predict}``.

Exit codes: 0 success, 1 runtime failure (divergence, bad input file,
dimension mismatch), 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import platform
import statistics
import sys

DEFAULT_ALPHA = 0.1
DEFAULT_EPSILON = 0.01


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0 or value == float("inf"):
        raise argparse.ArgumentTypeError(f"must be a positive finite number, got {text}")
    return value


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _fraction(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1), got {text}")
    return value


def _threshold(text):
    value = _fraction(text)
    if value == 0.0:
        raise argparse.ArgumentTypeError("must lie in (0, 1)")
    return value


_BACKENDS = {"seq": "sequential", "sequential": "sequential", "par": "parallel", "parallel": "parallel"}


def _backend(text):
    try:
        return _BACKENDS[text]
    except KeyError:
        raise argparse.ArgumentTypeError(f"backend must be seq or par, got {text!r}") from None


def _add_data_flags(p):
    p.add_argument("--data", default="blobs", help="CSV path, 'blobs' or 'random' (default: blobs)")
    p.add_argument("--limit-rows", type=_positive_int, help="read at most N rows of a CSV")
    p.add_argument("--n-samples", type=_positive_int, help="rows of a synthetic dataset "
                   "(default: 200 for blobs, 1000 for random)")
    p.add_argument("--n-features", type=_positive_int, help="features of a synthetic dataset "
                   "(default: 2 for blobs, 10 for random)")
    p.add_argument("--separation", type=_positive_float, default=8.0,
                   help="distance between blob centres along each axis (default: 8)")
    p.add_argument("--test-fraction", type=_fraction, default=0.2)
    p.add_argument("--standardize", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--seed", type=int, default=0)


def _add_train_flags(p):
    p.add_argument("--alpha", type=_positive_float, default=DEFAULT_ALPHA, help="learning rate")
    p.add_argument("--epsilon", type=_positive_float, default=DEFAULT_EPSILON,
                   help="gradient-norm tolerance")
    p.add_argument("--max-iters", type=_positive_int, default=10_000)
    p.add_argument("--no-intercept", dest="fit_intercept", action="store_false")
    p.add_argument("--unordered", dest="ordered", action="store_false",
                   help="free-order parallel reductions (faster, not bit-reproducible)")
    p.add_argument("--threshold", type=_threshold, default=0.5)
    p.add_argument("--threads", type=_positive_int,
                   help="worker threads for the parallel kernels (default: $PARLOGREG_THREADS "
                        "or the number of CPUs)")


def build_parser():
    parser = argparse.ArgumentParser(prog="parlogreg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit one backend and write a result file")
    _add_data_flags(p)
    _add_train_flags(p)
    p.add_argument("--backend", type=_backend, default="parallel", help="seq or par")
    p.add_argument("--out", default="train_result.json")

    p = sub.add_parser("benchmark", help="time both backends on the same data")
    _add_data_flags(p)
    _add_train_flags(p)
    p.add_argument("--reps", type=_positive_int, default=3)
    p.add_argument("--out", default="benchmark_result.json")

    p = sub.add_parser("predict", help="apply a trained result file to a CSV")
    p.add_argument("--weights", required=True, help="result file written by 'train'")
    p.add_argument("--data", required=True, help="CSV in training layout (label first)")
    p.add_argument("--no-labels", dest="has_labels", action="store_false",
                   help="the CSV holds features only")
    p.add_argument("--threshold", type=_threshold, default=0.5)
    p.add_argument("--threads", type=_positive_int)
    p.add_argument("--out", help="output CSV (default: stdout)")
    return parser


def _dataset_spec(args):
    from .data import DatasetSpec

    synthetic_defaults = {"blobs": (200, 2), "random": (1000, 10)}
    m, n = synthetic_defaults.get(args.data, (200, 2))
    return DatasetSpec(
        source=args.data,
        seed=args.seed,
        n_samples=args.n_samples or m,
        n_features=args.n_features or n,
        separation=args.separation,
        test_fraction=args.test_fraction,
        standardize=args.standardize,
        limit_rows=args.limit_rows,
    )


def _train_config(args, backend):
    from .model import TrainConfig

    return TrainConfig(
        alpha=args.alpha,
        epsilon=args.epsilon,
        max_iters=args.max_iters,
        backend=backend,
        fit_intercept=args.fit_intercept,
        ordered_reduction=args.ordered,
    )


def environment_notes():
    import numba
    import numpy

    from . import _threads

    return {
        "threads": _threads.get_threads(),
        "thread_pool_size": _threads.max_threads(),
        "cpu_count": _threads.hardware_threads(),
        "element_type": "float64",
        "python": platform.python_version(),
        "numpy": numpy.__version__,
        "numba": numba.__version__,
        "platform": platform.platform(),
    }


def _scores(result, train, test, threshold):
    from .metrics import evaluate

    out = {"train": evaluate(train.y, result.predict(train.X, threshold)).to_dict()}
    if test is not None and test.n_samples:
        out["test"] = evaluate(test.y, result.predict(test.X, threshold)).to_dict()
    return out


def _headline_f1(scores):
    return scores["test"]["f1"] if "test" in scores else scores["train"]["f1"]


def _write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _standardization_doc(means, stds):
    if means is None:
        return None
    return {"means": means.tolist(), "stds": stds.tolist()}


def cmd_train(args):
    from dataclasses import asdict

    from .model import fit

    spec = _dataset_spec(args)
    train, test, means, stds = spec.prepare()
    config = _train_config(args, args.backend)
    result = fit(train, config)
    scores = _scores(result, train, test, args.threshold)
    doc = {
        "command": "train",
        "dataset": asdict(spec),
        "config": config.to_dict(),
        "threshold": args.threshold,
        "n_features": train.n_features,
        "fit_intercept": result.fit_intercept,
        "weights": result.weights.tolist(),
        "iterations": result.iterations,
        "converged": result.converged,
        "final_grad_norm": result.final_grad_norm,
        "wall_time": result.wall_time,
        "loss_trace_tail": result.loss_trace[-5:],
        "standardization": _standardization_doc(means, stds),
        "metrics": scores,
        "environment": environment_notes(),
    }
    _write_json(args.out, doc)
    state = "converged" if result.converged else "stopped at max-iters"
    print(f"{config.backend.value}: {state} after {result.iterations} iterations, "
          f"|grad|={result.final_grad_norm:.3g}, f1={_headline_f1(scores):.3f}, "
          f"{result.wall_time:.3f} s -> {args.out}")
    return 0


def _benchmark_backend(backend, args, train, test):
    from .errors import DivergenceError
    from .metrics import timed
    from .model import fit

    config = _train_config(args, backend)
    row = {"config": config.to_dict(), "repetitions": []}
    result = None
    try:
        for _ in range(args.reps):
            result, seconds = timed(fit, train, config)
            row["repetitions"].append({
                "wall_time": seconds,
                "iterations": result.iterations,
                "converged": result.converged,
                "final_grad_norm": result.final_grad_norm,
            })
    except DivergenceError as exc:
        row.update(status="failed", error=str(exc), iteration=exc.iteration)
        return row
    scores = _scores(result, train, test, args.threshold)
    row.update(
        status="ok",
        median_wall_time=statistics.median(r["wall_time"] for r in row["repetitions"]),
        weights=result.weights.tolist(),
        f1=_headline_f1(scores),
        metrics=scores,
    )
    return row


def format_table(results):
    lines = [f"{'':<12}{'f1 score':>10}  {'execution time (seconds)':>26}"]
    for name in ("sequential", "parallel"):
        row = results.get(name)
        if row is None or row.get("status") != "ok":
            reason = "missing" if row is None else row.get("error", "failed")
            lines.append(f"{name:<12}{'FAILED':>10}  {reason}")
        else:
            lines.append(f"{name:<12}{row['f1']:>10.3f}  {row['median_wall_time']:>26.3f}")
    return "\n".join(lines)


def cmd_benchmark(args):
    from dataclasses import asdict

    from .kernels import warmup

    spec = _dataset_spec(args)
    train, test, means, stds = spec.prepare()
    warmup()
    results = {
        name: _benchmark_backend(name, args, train, test)
        for name in ("sequential", "parallel")
    }
    doc = {
        "command": "benchmark",
        "dataset": asdict(spec),
        "reps": args.reps,
        "seed": args.seed,
        "threshold": args.threshold,
        "n_train": train.n_samples,
        "n_test": 0 if test is None else test.n_samples,
        "standardization": _standardization_doc(means, stds),
        "results": results,
        "environment": environment_notes(),
    }
    _write_json(args.out, doc)
    print(format_table(results))
    print(f"results written to {args.out}")
    return 0 if all(r["status"] == "ok" for r in results.values()) else 1


def cmd_predict(args):
    import numpy as np

    from .data import apply_standardization, read_rows
    from .errors import DataFormatError, ShapeError
    from .metrics import evaluate
    from .model import add_intercept, predict_proba

    try:
        with open(args.weights, encoding="utf-8") as fh:
            doc = json.load(fh)
        weights = np.asarray(doc["weights"], dtype=np.float64)
        fit_intercept = bool(doc.get("fit_intercept", True))
    except (OSError, ValueError, KeyError) as exc:
        raise DataFormatError(f"cannot read weights from {args.weights}: {exc}") from exc

    rows = read_rows(args.data)
    out = open(args.out, "w", encoding="ascii") if args.out else sys.stdout
    try:
        if rows is None:
            return 0
        X, y = (rows[:, 1:], rows[:, 0]) if args.has_labels else (rows, None)
        expected = weights.shape[0] - int(fit_intercept)
        if X.shape[1] != expected:
            raise ShapeError(f"weights expect {expected} features but {args.data} has {X.shape[1]}")
        std = doc.get("standardization")
        if std is not None:
            X = apply_standardization(X, np.asarray(std["means"]), np.asarray(std["stds"]))
        if fit_intercept:
            X = add_intercept(X)
        proba = predict_proba(weights, X)
        labels = (proba >= args.threshold).astype(int)
        out.write("label,probability\n")
        for lab, p in zip(labels, proba):
            out.write(f"{lab},{float(p)!r}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    if y is not None:
        report = evaluate(y, labels.astype(np.float64))
        print(f"f1={report.f1:.4f} on {report.n_samples} rows", file=sys.stderr)
    return 0


_COMMANDS = {"train": cmd_train, "benchmark": cmd_benchmark, "predict": cmd_predict}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads:
        # must be in place before numba is first imported
        os.environ["PARLOGREG_THREADS"] = str(args.threads)
    try:
        from . import _threads

        if args.threads:
            _threads.set_threads(args.threads)
    except ValueError as exc:
        parser.error(str(exc))

    from .errors import DataFormatError, DivergenceError, ShapeError

    try:
        return _COMMANDS[args.command](args)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DataFormatError, ShapeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
