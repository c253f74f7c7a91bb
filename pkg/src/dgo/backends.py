"""Evaluation backends: sequential baseline, process-pool data parallelism
with deterministic min-reduction, and multi-start clusters.

All backends satisfy one contract: for identical inputs they return value
sequences equal element-wise to the sequential backend's, in canonical
child order, regardless of completion order. Objectives must therefore be
pure, reentrant, and free of shared mutable state; pool backends
additionally require them to be picklable.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Sequence

from .encoding import Bits, Quantizer, decode_point
from .neighborhood import ChildSet
from .objectives import Objective

if TYPE_CHECKING:  # pragma: no cover
    from .engine import RunConfig, RunResult

IndexedValues = list[tuple[int, float]]


def partition_children(count: int, workers: int) -> tuple[tuple[int, int], ...]:
    """Balanced contiguous index ranges: one half-open (start, stop) per worker.

    Ranges partition 0..count-1 with no gaps or overlap, and sizes differ
    by at most one; the largest is ceil(count / workers). Workers beyond
    count receive empty ranges.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    base, extra = divmod(count, workers)
    ranges = []
    start = 0
    for w in range(workers):
        size = base + (1 if w < extra else 0)
        ranges.append((start, start + size))
        start += size
    return tuple(ranges)


def reduce_min(values: Sequence[tuple[int, float]]) -> tuple[int, float]:
    """Minimum value with the smallest index on ties; order-independent."""
    if not values:
        raise ValueError("reduce_min requires at least one value")
    return min(values, key=lambda pair: (pair[1], pair[0]))


def _evaluate_span(rows: Sequence[Bits], objective: Objective,
                   quantizer: Quantizer) -> list[float]:
    """Decode and evaluate a contiguous span of children.

    Shared by every backend (workers run this exact function), so values
    are bit-identical across backends. Non-finite results become +inf so
    they are never selected or accepted.
    """
    out = []
    for bits in rows:
        v = float(objective.evaluate(decode_point(bits, quantizer)))
        out.append(v if math.isfinite(v) else math.inf)
    return out


class SequentialBackend:
    """Evaluate children one by one in the driver. The reference backend."""

    description = "seq"

    def evaluate(self, rows: Sequence[Bits], objective: Objective,
                 quantizer: Quantizer) -> list[float]:
        return _evaluate_span(rows, objective, quantizer)

    def close(self) -> None:
        pass

    def __enter__(self) -> "SequentialBackend":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class WorkerPoolBackend:
    """Evaluate each batch across a pool of worker processes.

    Children are statically partitioned into one contiguous chunk per
    worker; the driver concatenates chunk results in canonical order, so
    the output is independent of completion order. The process pool is
    created lazily and reused across batches; call :meth:`close` (or use
    the backend as a context manager) when done.
    """

    def __init__(self, workers: int) -> None:
        if workers < 1:
            raise ValueError(f"workers must be >= 1, got {workers}")
        self.workers = workers
        self._pool: ProcessPoolExecutor | None = None

    @property
    def description(self) -> str:
        return f"pool:{self.workers}"

    def evaluate(self, rows: Sequence[Bits], objective: Objective,
                 quantizer: Quantizer) -> list[float]:
        if self._pool is None:
            self._pool = ProcessPoolExecutor(max_workers=self.workers)
        futures = []
        for start, stop in partition_children(len(rows), self.workers):
            if start == stop:
                continue
            futures.append(
                self._pool.submit(_evaluate_span, rows[start:stop], objective, quantizer)
            )
        out: list[float] = []
        for future in futures:
            out.extend(future.result())
        return out

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self) -> "WorkerPoolBackend":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


Backend = SequentialBackend | WorkerPoolBackend


def make_backend(spec: str | Backend, default_workers: int | None = None) -> Backend:
    """Build a backend from a spec string: "seq", "pool", or "pool:W".

    A bare "pool" uses ``default_workers`` (falling back to the CPU
    count). Backend instances pass through unchanged.
    """
    if not isinstance(spec, str):
        return spec
    if spec == "seq":
        return SequentialBackend()
    if spec == "pool" or spec.startswith("pool:"):
        if spec == "pool":
            workers = default_workers or os.cpu_count() or 1
        else:
            try:
                workers = int(spec.split(":", 1)[1])
            except ValueError:
                raise ValueError(f"invalid worker count in backend spec {spec!r}") from None
        return WorkerPoolBackend(workers)
    raise ValueError(f"unknown backend spec {spec!r} (expected seq, pool, or pool:W)")


def evaluate_batch(children: ChildSet | Sequence[Bits], objective: Objective,
                   quantizer: Quantizer, backend: Backend | None = None) -> IndexedValues:
    """Evaluate every child once; returns (index, value) in canonical order."""
    rows = children.children if isinstance(children, ChildSet) else tuple(children)
    if backend is None:
        backend = SequentialBackend()
    values = backend.evaluate(rows, objective, quantizer)
    if len(values) != len(rows):
        raise RuntimeError(
            f"backend returned {len(values)} values for {len(rows)} children"
        )
    return list(enumerate(values))


@dataclass(frozen=True)
class MultistartResult:
    """Outcome of independent clustered runs joined by a final min."""

    best: "RunResult"
    best_cluster: int
    runs: tuple["RunResult", ...]


def run_multistart(config: "RunConfig", objective: Objective, clusters: int,
                   backend: Backend | None = None) -> MultistartResult:
    """Run ``clusters`` independent searches and keep the deepest result.

    Cluster i uses seed config.seed + i; ties break to the lowest cluster
    ordinal. Clusters share nothing but the final reduction, so each
    per-cluster result is identical to the same run executed alone. A
    fixed config.initial_point makes every cluster start identically.
    """
    from .engine import run  # deferred: engine imports this module

    if clusters < 1:
        raise ValueError(f"clusters must be >= 1, got {clusters}")
    runs = []
    for i in range(clusters):
        runs.append(run(replace(config, seed=config.seed + i), objective, backend))
    best_cluster, _ = reduce_min([(i, r.best_value) for i, r in enumerate(runs)])
    return MultistartResult(
        best=runs[best_cluster], best_cluster=best_cluster, runs=tuple(runs)
    )
