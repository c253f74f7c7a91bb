"""The DGO outer loop.

Each iteration generates all 2L-1 children of the current parent,
evaluates them through a backend, and takes the deepest strict
improvement. When no child strictly improves, the resolution rises by one
bit per variable (the parent re-expressed on the finer grid, its value
refreshed); at the maximum resolution the run terminates. An evaluation
budget hard-caps the whole process: work that would exceed it is never
started, so the total count stays within the budget.

One run is a single sequential driver; all intra-iteration parallelism
lives behind the backend. Runs share no mutable state.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .backends import Backend, evaluate_batch, reduce_min
from .encoding import Bits, Quantizer, decode_point, encode_point, requantize
from .neighborhood import generate_children
from .objectives import Objective


class StepKind(str, Enum):
    ACCEPTED = "accepted"
    RESOLUTION_INCREASED = "resolution_increased"
    TERMINATED = "terminated"


class TerminationReason(str, Enum):
    BUDGET = "budget"
    MAX_RESOLUTION = "max_resolution"


@dataclass(frozen=True)
class RunConfig:
    """Search parameters independent of the objective.

    ``seed`` drives the random initial point when ``initial_point`` is
    not supplied; runs are fully deterministic given a seed.
    """

    bits_init: int = 4
    bits_max: int = 16
    max_evals: int = 100_000
    seed: int = 0
    initial_point: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not 1 <= self.bits_init <= self.bits_max:
            raise ValueError(
                f"need 1 <= bits_init <= bits_max, got {self.bits_init}, {self.bits_max}"
            )
        if self.max_evals < 1:
            raise ValueError(f"max_evals must be >= 1, got {self.max_evals}")
        if self.initial_point is not None:
            object.__setattr__(self, "initial_point",
                               tuple(float(v) for v in self.initial_point))


@dataclass
class SearchState:
    parent: Bits
    parent_value: float
    quantizer: Quantizer
    iteration: int
    evals: int


@dataclass(frozen=True)
class StepOutcome:
    kind: StepKind
    child_index: int | None = None
    value: float | None = None
    new_bits_per_var: int | None = None
    reason: TerminationReason | None = None


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    bits_per_var: int
    best_value: float
    accepted: bool
    evals_total: int
    wall_ns: int


@dataclass(frozen=True)
class RunResult:
    best_point: tuple[float, ...]
    best_value: float
    trace: tuple[TraceRecord, ...]
    evals: int
    iterations: int
    bits_final: int
    reason: TerminationReason
    wall_ns: int
    config: RunConfig | None = field(repr=False, default=None)


def dgo_step(state: SearchState, child_values: Sequence[tuple[int, float]],
             bits_max: int) -> StepOutcome:
    """Decide one iteration from the evaluated children.

    Picks the minimum child (smallest index on ties). A strict
    improvement over the parent is accepted; otherwise the step requests
    a resolution increase, or termination when already at bits_max. Ties
    with the parent count as no improvement, which prevents cycling over
    equal-valued points.
    """
    expected = 2 * len(state.parent) - 1
    if len(child_values) != expected:
        raise ValueError(
            f"expected {expected} child values, got {len(child_values)}"
        )
    index, value = reduce_min(child_values)
    if value < state.parent_value:
        return StepOutcome(kind=StepKind.ACCEPTED, child_index=index, value=value)
    if state.quantizer.bits_per_var < bits_max:
        return StepOutcome(
            kind=StepKind.RESOLUTION_INCREASED,
            new_bits_per_var=state.quantizer.bits_per_var + 1,
        )
    return StepOutcome(kind=StepKind.TERMINATED, reason=TerminationReason.MAX_RESOLUTION)


def increase_resolution(state: SearchState, objective: Objective,
                        bits_max: int) -> SearchState:
    """Move the state to the next finer grid (one more bit per variable).

    The parent is re-expressed on the new grid, which can shift its
    decoded point by up to half a new-grid step per dimension, so its
    stored value is refreshed with one extra evaluation.
    """
    q_old = state.quantizer
    if q_old.bits_per_var >= bits_max:
        raise ValueError("already at maximum resolution")
    q_new = q_old.with_bits_per_var(q_old.bits_per_var + 1)
    parent = requantize(state.parent, q_old, q_new)
    value = _evaluate_point(objective, decode_point(parent, q_new))
    return SearchState(
        parent=parent,
        parent_value=value,
        quantizer=q_new,
        iteration=state.iteration,
        evals=state.evals + 1,
    )


def _evaluate_point(objective: Objective, x: Sequence[float]) -> float:
    value = float(objective.evaluate(x))
    return value if math.isfinite(value) else math.inf


def initial_point(config: RunConfig, objective: Objective) -> tuple[float, ...]:
    """The configured start, or a seeded uniform draw inside the box."""
    if config.initial_point is not None:
        if len(config.initial_point) != objective.dims:
            raise ValueError(
                f"initial_point has {len(config.initial_point)} coordinates, "
                f"objective has {objective.dims} dims"
            )
        return config.initial_point
    rng = random.Random(config.seed)
    return tuple(rng.uniform(lo, hi) for lo, hi in objective.bounds)


def run(config: RunConfig, objective: Objective,
        backend: Backend | None = None) -> RunResult:
    """Execute a full search: generate, evaluate, select, escalate.

    Returns the best decoded point and value seen, the per-iteration
    trace, and accounting totals. The outcome sequence and trace (modulo
    wall-clock fields) are identical for any backend and fully determined
    by the config and objective.
    """
    start_ns = time.perf_counter_ns()
    quantizer = Quantizer(objective.dims, config.bits_init, objective.bounds)
    parent = encode_point(initial_point(config, objective), quantizer)
    decoded = decode_point(parent, quantizer)
    parent_value = _evaluate_point(objective, decoded)
    evals = 1
    best_point, best_value = decoded, parent_value

    trace: list[TraceRecord] = []
    iteration = 0
    reason = None
    while True:
        batch = 2 * quantizer.n_bits - 1
        if evals + batch > config.max_evals:
            reason = TerminationReason.BUDGET
            break
        children = generate_children(parent)
        values = evaluate_batch(children, objective, quantizer, backend)
        evals += batch
        iteration += 1
        state = SearchState(parent, parent_value, quantizer, iteration, evals)
        outcome = dgo_step(state, values, config.bits_max)

        accepted = outcome.kind is StepKind.ACCEPTED
        if accepted:
            parent = children.children[outcome.child_index]
            parent_value = outcome.value
            if parent_value < best_value:
                best_point = decode_point(parent, quantizer)
                best_value = parent_value
        trace.append(TraceRecord(
            iteration=iteration,
            bits_per_var=quantizer.bits_per_var,
            best_value=best_value,
            accepted=accepted,
            evals_total=evals,
            wall_ns=time.perf_counter_ns() - start_ns,
        ))

        if outcome.kind is StepKind.RESOLUTION_INCREASED:
            if evals + 1 > config.max_evals:
                reason = TerminationReason.BUDGET
                break
            state = increase_resolution(state, objective, config.bits_max)
            parent = state.parent
            parent_value = state.parent_value
            quantizer = state.quantizer
            evals = state.evals
            if parent_value < best_value:
                best_point = decode_point(parent, quantizer)
                best_value = parent_value
        elif outcome.kind is StepKind.TERMINATED:
            reason = outcome.reason
            break

    return RunResult(
        best_point=best_point,
        best_value=best_value,
        trace=tuple(trace),
        evals=evals,
        iterations=iteration,
        bits_final=quantizer.bits_per_var,
        reason=reason,
        wall_ns=time.perf_counter_ns() - start_ns,
        config=config,
    )
