"""Benchmark and optimization command line.

Subcommands:
    optimize        run one optimization and write a per-iteration trace
    bench scaling   per-iteration wall time vs dimension count
    bench speedup   wall time and speedup vs worker count
    train xor       error traces for DGO and/or the gradient-descent baseline

Reports are CSV by default (header row mandatory, metadata and derived
figures as trailing ``# key=value`` comment lines) or JSON via --format.
Traces rerun byte-identically for identical flags and seed once wall-time
columns are suppressed with --no-walltime.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import platform
import random
import statistics
import sys
from datetime import datetime, timezone

import numpy as np

from .backends import (SequentialBackend, WorkerPoolBackend, make_backend,
                       run_multistart)
from .engine import RunConfig, run
from .objectives import (Multimodal1D, Objective, Quadratic, Shekel,
                         SpinObjective, XorNetwork, gd_train, xor_forward,
                         XOR_PATTERNS)

TRACE_COLUMNS = ("iteration", "bits_per_var", "best_value", "accepted",
                 "evals_total", "wall_ns")
SPEEDUP_COLUMNS = ("backend", "workers", "wall_ms", "speedup")
SCALING_COLUMNS = ("dims", "bits_per_var", "evals_per_iter", "iterations",
                   "mean_iter_wall_ns")

OBJECTIVE_NAMES = ("quadratic", "shekel", "multimodal1d", "xor")


class ConfigError(Exception):
    """Invalid flag combination; maps to a nonzero exit status."""


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _bounds_from_flags(los, his, dims, default):
    if not los and not his:
        return default
    if bool(los) != bool(his):
        raise ConfigError("--lo and --hi must be given together")
    if len(los) != len(his):
        raise ConfigError("--lo and --hi must repeat the same number of times")
    if len(los) == 1:
        los, his = los * dims, his * dims
    if len(los) != dims:
        raise ConfigError(
            f"got {len(los)} bounds pairs for {dims} dimensions "
            "(give one pair, or one per dimension)"
        )
    return tuple(zip(los, his))


def build_objective(name: str, dims, los, his, spin_ns: int = 0) -> Objective:
    """Construct a suite objective from CLI flags."""
    if name == "quadratic":
        dims = dims or 2
        bounds = _bounds_from_flags(los, his, dims, ((-10.0, 10.0),) * dims)
        obj: Objective = Quadratic(dims=dims, bounds=bounds)
    elif name == "shekel":
        if dims not in (None, 4):
            raise ConfigError("the default shekel configuration is 4-dimensional")
        bounds = _bounds_from_flags(los, his, 4, ((0.0, 10.0),) * 4)
        obj = Shekel(bounds=bounds)
    elif name == "multimodal1d":
        if dims not in (None, 1):
            raise ConfigError("multimodal1d is 1-dimensional")
        bounds = _bounds_from_flags(los, his, 1, ((-5.0, 5.0),))
        obj = Multimodal1D(bounds=bounds)
    elif name == "xor":
        if dims not in (None, 8):
            raise ConfigError("the xor network has exactly 8 weights")
        bounds = _bounds_from_flags(los, his, 8, ((-20.0, 20.0),) * 8)
        obj = XorNetwork(bounds=bounds)
    else:
        raise ConfigError(
            f"unknown objective {name!r} (choose from {', '.join(OBJECTIVE_NAMES)})"
        )
    if spin_ns:
        obj = SpinObjective(obj, spin_ns)
    return obj


def _resolve_backend(spec: str):
    try:
        if spec == "pool":
            env = os.environ.get("DGO_WORKERS")
            try:
                workers = int(env) if env else None
            except ValueError:
                raise ValueError(f"DGO_WORKERS={env!r} is not an integer") from None
            return make_backend("pool", default_workers=workers)
        return make_backend(spec)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _metadata(**extra) -> dict:
    meta = {
        "hardware": f"{platform.platform()} / {os.cpu_count()} cpus",
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    meta.update(extra)
    return meta


def _write_comments(fh, meta: dict) -> None:
    for key, value in meta.items():
        fh.write(f"# {key}={value}\n")


def _write_trace_csv(fh, trace, include_wall: bool) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    columns = TRACE_COLUMNS if include_wall else TRACE_COLUMNS[:-1]
    writer.writerow(columns)
    for r in trace:
        row = [r.iteration, r.bits_per_var, _fmt(r.best_value),
               int(r.accepted), r.evals_total]
        if include_wall:
            row.append(r.wall_ns)
        writer.writerow(row)


def _trace_rows_json(trace, include_wall: bool) -> list[dict]:
    rows = []
    for r in trace:
        row = {
            "iteration": r.iteration,
            "bits_per_var": r.bits_per_var,
            "best_value": r.best_value,
            "accepted": bool(r.accepted),
            "evals_total": r.evals_total,
        }
        if include_wall:
            row["wall_ns"] = r.wall_ns
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# optimize
# ---------------------------------------------------------------------------

def cmd_optimize(args) -> int:
    objective = build_objective(args.objective, args.dims, args.lo, args.hi,
                                args.spin_ns)
    if args.start is not None and len(args.start) != objective.dims:
        raise ConfigError(
            f"--start needs {objective.dims} coordinates, got {len(args.start)}"
        )
    try:
        config = RunConfig(
            bits_init=args.bits_init,
            bits_max=args.bits_max,
            max_evals=args.max_evals,
            seed=args.seed,
            initial_point=tuple(args.start) if args.start else None,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    backend = _resolve_backend(args.backend)
    try:
        if args.clusters == 1:
            result = run(config, objective, backend)
            best = result
            cluster_note = ""
        else:
            if args.clusters < 1:
                raise ConfigError("--clusters must be >= 1")
            multi = run_multistart(config, objective, args.clusters, backend)
            best = multi.best
            cluster_note = f" (cluster {multi.best_cluster} of {args.clusters})"
            for i, r in enumerate(multi.runs):
                print(f"cluster {i}: best_value={_fmt(r.best_value)} "
                      f"evals={r.evals} reason={r.reason.value}")
    finally:
        backend.close()

    include_wall = not args.no_walltime
    if args.trace:
        try:
            with open(args.trace, "w", newline="") as fh:
                if args.format == "csv":
                    _write_trace_csv(fh, best.trace, include_wall)
                else:
                    summary = {
                        "schema": "dgo-trace-v1",
                        "objective": args.objective,
                        "backend": backend.description,
                        "best_point": list(best.best_point),
                        "best_value": best.best_value,
                        "evals": best.evals,
                        "iterations": best.iterations,
                        "bits_final": best.bits_final,
                        "reason": best.reason.value,
                        "trace": _trace_rows_json(best.trace, include_wall),
                    }
                    if include_wall:
                        summary["wall_ns"] = best.wall_ns
                    json.dump(summary, fh, indent=2)
                    fh.write("\n")
        except OSError as exc:
            raise ConfigError(f"cannot write trace file: {exc}") from None

    point = ", ".join(_fmt(v) for v in best.best_point)
    print(f"best_value={_fmt(best.best_value)} at ({point}){cluster_note}")
    print(f"evals={best.evals} iterations={best.iterations} "
          f"bits_final={best.bits_final} reason={best.reason.value}")
    return 0


# ---------------------------------------------------------------------------
# bench scaling
# ---------------------------------------------------------------------------

def _timed_runs(config: RunConfig, objective: Objective, backend, reps: int):
    """One warmup run, then reps timed runs; all identical by determinism."""
    run(config, objective, backend)
    results = []
    for _ in range(reps):
        results.append(run(config, objective, backend))
    return results


def cmd_bench_scaling(args) -> int:
    dims_list = list(args.dims)
    if len(dims_list) < 3:
        raise ConfigError("need at least 3 dims values to fit a slope")
    if any(d < 1 for d in dims_list):
        raise ConfigError("dims values must be >= 1")
    if args.reps < 1:
        raise ConfigError("--reps must be >= 1")

    backend = SequentialBackend()
    rows = []
    for dims in dims_list:
        objective = Quadratic(dims=dims)
        config = RunConfig(bits_init=args.bits, bits_max=args.bits,
                           max_evals=args.max_evals, seed=args.seed)
        results = _timed_runs(config, objective, backend, args.reps)
        iterations = results[0].iterations
        if iterations == 0:
            raise ConfigError(
                f"dims={dims}: no full iteration fits max_evals={args.max_evals}"
            )
        per_iter = statistics.median(r.wall_ns / r.iterations for r in results)
        rows.append({
            "dims": dims,
            "bits_per_var": args.bits,
            "evals_per_iter": 2 * dims * args.bits - 1,
            "iterations": iterations,
            "mean_iter_wall_ns": per_iter,
        })

    slope = float(np.polyfit(
        np.log([r["dims"] for r in rows]),
        np.log([r["mean_iter_wall_ns"] for r in rows]),
        1,
    )[0])
    meta = _metadata(schema="dgo-bench-scaling-v1", reps=args.reps,
                     loglog_slope=_fmt(slope))

    with _open_report(args.out) as fh:
        if args.format == "csv":
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(SCALING_COLUMNS)
            for r in rows:
                writer.writerow([r["dims"], r["bits_per_var"], r["evals_per_iter"],
                                 r["iterations"], _fmt(r["mean_iter_wall_ns"])])
            _write_comments(fh, meta)
        else:
            json.dump({"schema": meta.pop("schema"), "rows": rows,
                       "loglog_slope": slope, "metadata": meta}, fh, indent=2)
            fh.write("\n")
    print(f"loglog_slope={_fmt(slope)}")
    return 0


# ---------------------------------------------------------------------------
# bench speedup
# ---------------------------------------------------------------------------

def cmd_bench_speedup(args) -> int:
    workers = sorted(set(args.workers))
    if 1 not in workers:
        raise ConfigError("--workers must include 1 (the baseline)")
    if any(w < 1 for w in workers):
        raise ConfigError("worker counts must be >= 1")
    if args.reps < 1:
        raise ConfigError("--reps must be >= 1")

    objective = build_objective("quadratic", args.dims, [], [], args.spin_ns)
    children = 2 * args.dims * args.bits - 1
    max_evals = args.max_evals or 1 + args.batches * children
    config = RunConfig(bits_init=args.bits, bits_max=args.bits,
                       max_evals=max_evals, seed=args.seed)

    rows = []
    baseline_ms = None
    for w in workers:
        backend = SequentialBackend() if w == 1 else WorkerPoolBackend(w)
        try:
            results = _timed_runs(config, objective, backend, args.reps)
        finally:
            backend.close()
        wall_ms = statistics.median(r.wall_ns for r in results) / 1e6
        if w == 1:
            baseline_ms = wall_ms
        rows.append({
            "backend": "seq" if w == 1 else "pool",
            "workers": w,
            "wall_ms": wall_ms,
            "speedup": baseline_ms / wall_ms,
        })

    meta = _metadata(schema="dgo-bench-speedup-v1", reps=args.reps,
                     spin_ns=args.spin_ns, children_per_batch=children,
                     evals_per_run=_run_evals(config, objective))
    with _open_report(args.out) as fh:
        if args.format == "csv":
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(SPEEDUP_COLUMNS)
            for r in rows:
                writer.writerow([r["backend"], r["workers"],
                                 _fmt(r["wall_ms"]), _fmt(r["speedup"])])
            _write_comments(fh, meta)
        else:
            json.dump({"schema": meta.pop("schema"), "rows": rows,
                       "metadata": meta}, fh, indent=2)
            fh.write("\n")
    for r in rows:
        print(f"{r['backend']:>4} workers={r['workers']} "
              f"wall_ms={r['wall_ms']:.3f} speedup={r['speedup']:.3f}")
    return 0


def _run_evals(config: RunConfig, objective: Objective) -> int:
    # cheap deterministic probe, spin removed, for metadata only
    inner = objective.inner if isinstance(objective, SpinObjective) else objective
    return run(config, inner, SequentialBackend()).evals


# ---------------------------------------------------------------------------
# train xor
# ---------------------------------------------------------------------------

def cmd_train_xor(args) -> int:
    if args.weights is not None and len(args.weights) != 8:
        raise ConfigError("--weights takes exactly 8 values")
    objective = XorNetwork()
    if args.weights is not None:
        w0 = tuple(args.weights)
    else:
        rng = random.Random(args.seed)
        w0 = tuple(rng.uniform(lo, hi) for lo, hi in objective.bounds)

    os.makedirs(args.out_dir, exist_ok=True)
    summaries = []

    if args.optimizer in ("dgo", "both"):
        try:
            config = RunConfig(bits_init=args.bits_init, bits_max=args.bits_max,
                               max_evals=args.max_evals, seed=args.seed,
                               initial_point=w0)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        backend = _resolve_backend(args.backend)
        try:
            result = run(config, objective, backend)
        finally:
            backend.close()
        # best-so-far includes the supplied start itself: encoding the
        # start onto the grid may round it to a worse point
        initial_sse = objective.evaluate(w0)
        rows = [(1, initial_sse)] + [
            (r.evals_total, min(initial_sse, r.best_value)) for r in result.trace
        ]
        if result.best_value < initial_sse:
            final_sse, final_weights = result.best_value, result.best_point
        else:
            final_sse, final_weights = initial_sse, w0
        path = os.path.join(args.out_dir, "xor_dgo.csv")
        _write_error_trace(path, "evals", rows, args.format)
        summaries.append(("dgo", final_sse, final_weights, path))

    if args.optimizer in ("gd", "both"):
        gd = gd_train(w0, args.lr, args.steps)
        path = os.path.join(args.out_dir, "xor_gd.csv")
        _write_error_trace(path, "step", gd.trace, args.format)
        if gd.diverged:
            print("gd: diverged (non-finite error), trace truncated")
        summaries.append(("gd", gd.trace[-1][1], gd.weights, path))

    status = 0
    for name, sse, weights, path in summaries:
        outputs, _ = xor_forward(weights)
        correct = all((y >= 0.5) == (t >= 0.5)
                      for (_, _, t), y in zip(XOR_PATTERNS, outputs))
        print(f"{name}: final_sse={_fmt(sse)} "
              f"classifies_all={'yes' if correct else 'no'} trace={path}")
    return status


def _write_error_trace(path: str, xname: str, rows, fmt: str) -> None:
    try:
        with open(path, "w", newline="") as fh:
            if fmt == "csv":
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow([xname, "sse"])
                for x, sse in rows:
                    writer.writerow([x, _fmt(sse)])
            else:
                json.dump({"schema": "dgo-error-trace-v1", "x": xname,
                           "rows": [{xname: x, "sse": sse} for x, sse in rows]},
                          fh, indent=2)
                fh.write("\n")
    except OSError as exc:
        raise ConfigError(f"cannot write trace file: {exc}") from None


class _open_report:
    """Open a report path for writing; '-' means stdout."""

    def __init__(self, path: str):
        self.path = path
        self.fh = None

    def __enter__(self):
        if self.path == "-":
            return sys.stdout
        try:
            self.fh = open(self.path, "w", newline="")
        except OSError as exc:
            raise ConfigError(f"cannot write report: {exc}") from None
        return self.fh

    def __exit__(self, *exc):
        if self.fh is not None:
            self.fh.close()


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bits-init", type=int, default=4)
    p.add_argument("--bits-max", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-evals", type=int, default=100_000)
    p.add_argument("--backend", default="seq",
                   help="seq, pool, or pool:W (bare pool honors DGO_WORKERS)")
    p.add_argument("--spin-ns", type=int, default=0,
                   help="busy-work nanoseconds added to every evaluation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dgo",
        description="Deterministic global optimization over gray-coded "
                    "bit strings, with benchmark harnesses.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_opt = sub.add_parser("optimize", help="run one optimization")
    p_opt.add_argument("--objective", required=True, choices=OBJECTIVE_NAMES)
    p_opt.add_argument("--dims", type=int, default=None)
    p_opt.add_argument("--lo", type=float, action="append", default=[],
                       help="lower bound; repeat for per-dimension values")
    p_opt.add_argument("--hi", type=float, action="append", default=[],
                       help="upper bound; repeat for per-dimension values")
    p_opt.add_argument("--start", type=float, nargs="+", default=None,
                       help="explicit initial point (default: seeded random)")
    p_opt.add_argument("--clusters", type=int, default=1)
    p_opt.add_argument("--trace", default=None, help="trace output path")
    p_opt.add_argument("--format", choices=("csv", "json"), default="csv")
    p_opt.add_argument("--no-walltime", action="store_true",
                       help="suppress wall-time columns for exact diffing")
    _add_common_run_flags(p_opt)
    p_opt.set_defaults(handler=cmd_optimize)

    p_bench = sub.add_parser("bench", help="measurement harnesses")
    bench_sub = p_bench.add_subparsers(dest="bench_command", required=True)

    p_scal = bench_sub.add_parser("scaling",
                                  help="per-iteration time vs dimensions")
    p_scal.add_argument("--dims", type=int, nargs="+",
                        default=list(range(2, 13)))
    p_scal.add_argument("--bits", type=int, default=8)
    p_scal.add_argument("--reps", type=int, default=5)
    p_scal.add_argument("--seed", type=int, default=0)
    p_scal.add_argument("--max-evals", type=int, default=1_000_000)
    p_scal.add_argument("--out", default="-", help="report path ('-' = stdout)")
    p_scal.add_argument("--format", choices=("csv", "json"), default="csv")
    p_scal.set_defaults(handler=cmd_bench_scaling)

    p_speed = bench_sub.add_parser("speedup",
                                   help="wall time and speedup vs workers")
    p_speed.add_argument("--workers", type=int, nargs="+", default=[1, 2, 4, 8])
    p_speed.add_argument("--dims", type=int, default=8)
    p_speed.add_argument("--bits", type=int, default=8)
    p_speed.add_argument("--spin-ns", type=int, default=0)
    p_speed.add_argument("--reps", type=int, default=5)
    p_speed.add_argument("--seed", type=int, default=0)
    p_speed.add_argument("--batches", type=int, default=5,
                         help="workload size in full child batches")
    p_speed.add_argument("--max-evals", type=int, default=None,
                         help="override the derived evaluation workload")
    p_speed.add_argument("--out", default="-", help="report path ('-' = stdout)")
    p_speed.add_argument("--format", choices=("csv", "json"), default="csv")
    p_speed.set_defaults(handler=cmd_bench_speedup)

    p_train = sub.add_parser("train", help="model training demonstrations")
    train_sub = p_train.add_subparsers(dest="train_command", required=True)

    p_xor = train_sub.add_parser("xor", help="XOR network error traces")
    p_xor.add_argument("--optimizer", choices=("dgo", "gd", "both"),
                       default="both")
    p_xor.add_argument("--weights", type=float, nargs="+", default=None,
                       help="8 starting weights (default: seeded random)")
    p_xor.add_argument("--lr", type=float, default=0.5)
    p_xor.add_argument("--steps", type=int, default=20_000)
    p_xor.add_argument("--out-dir", default=".")
    p_xor.add_argument("--format", choices=("csv", "json"), default="csv")
    p_xor.set_defaults(handler=cmd_train_xor)
    _add_common_run_flags(p_xor)
    p_xor.set_defaults(bits_max=12, max_evals=1_000_000)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
