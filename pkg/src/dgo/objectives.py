"""Objective suite: quadratic benchmark, Shekel foci, a 1-D multimodal
sample, and an 8-weight XOR network with a gradient-descent baseline.

Every objective is pure and reentrant (safe under concurrent batch
evaluation) and must be picklable so process-pool backends can ship it to
workers. All are minimized.
"""

from __future__ import annotations

import math
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Sequence

BoundsLike = Sequence[tuple[float, float]]


class Objective(ABC):
    """A box-bounded scalar minimization target.

    Subclasses set ``dims`` and ``bounds`` (one (lo, hi) pair per
    dimension) and implement ``evaluate``. Evaluation must be
    deterministic: repeated calls at the same point return bit-identical
    values.
    """

    dims: int
    bounds: tuple[tuple[float, float], ...]

    @abstractmethod
    def evaluate(self, x: Sequence[float]) -> float:
        raise NotImplementedError

    def __call__(self, x: Sequence[float]) -> float:
        return self.evaluate(x)


def _normalize_bounds(bounds: BoundsLike, dims: int) -> tuple[tuple[float, float], ...]:
    out = tuple((float(lo), float(hi)) for lo, hi in bounds)
    if len(out) != dims:
        raise ValueError(f"expected {dims} bounds pairs, got {len(out)}")
    for lo, hi in out:
        if not lo < hi:
            raise ValueError(f"need lo < hi, got ({lo}, {hi})")
    return out


class Quadratic(Objective):
    """sum_j (x_j - c_j)^2; global minimum 0 at the center c."""

    def __init__(self, dims: int = 2, center: Sequence[float] | None = None,
                 bounds: BoundsLike | None = None) -> None:
        self.dims = dims
        self.center = tuple(float(c) for c in center) if center is not None \
            else (0.0,) * dims
        if len(self.center) != dims:
            raise ValueError("center length must equal dims")
        self.bounds = _normalize_bounds(bounds or ((-10.0, 10.0),) * dims, dims)

    def evaluate(self, x: Sequence[float]) -> float:
        total = 0.0
        for xj, cj in zip(x, self.center):
            d = xj - cj
            total += d * d
        return total


# Default Shekel configuration: the classic 5-focus set on [0, 10]^4.
# Its optimum is established by tools/precompute_oracles.py (dense grid
# plus local refinement), not quoted from literature.
SHEKEL5_FOCI: tuple[tuple[float, ...], ...] = (
    (4.0, 4.0, 4.0, 4.0),
    (1.0, 1.0, 1.0, 1.0),
    (8.0, 8.0, 8.0, 8.0),
    (6.0, 6.0, 6.0, 6.0),
    (3.0, 7.0, 3.0, 7.0),
)
SHEKEL5_SHIFTS: tuple[float, ...] = (0.1, 0.2, 0.2, 0.4, 0.4)


class Shekel(Objective):
    """-sum_j 1 / (||x - a_j||^2 + c_j) over m foci a_j with shifts c_j > 0.

    Each focus carves a basin of depth about -1/c_j; the value tends to 0
    from below far from every focus, and is bounded below by -sum_j 1/c_j.
    """

    def __init__(self, foci: Sequence[Sequence[float]] = SHEKEL5_FOCI,
                 shifts: Sequence[float] = SHEKEL5_SHIFTS,
                 bounds: BoundsLike | None = None) -> None:
        self.foci = tuple(tuple(float(a) for a in row) for row in foci)
        self.shifts = tuple(float(c) for c in shifts)
        if len(self.foci) != len(self.shifts):
            raise ValueError("need one shift per focus")
        if not self.foci:
            raise ValueError("need at least one focus")
        if any(c <= 0.0 for c in self.shifts):
            raise ValueError("shifts must all be positive")
        d = len(self.foci[0])
        if any(len(row) != d for row in self.foci):
            raise ValueError("all foci must have the same dimension")
        self.dims = d
        self.bounds = _normalize_bounds(bounds or ((0.0, 10.0),) * d, d)

    def evaluate(self, x: Sequence[float]) -> float:
        total = 0.0
        for row, c in zip(self.foci, self.shifts):
            r = 0.0
            for xk, ak in zip(x, row):
                d = xk - ak
                r += d * d
            total -= 1.0 / (r + c)
        return total


class Multimodal1D(Objective):
    """f(x) = 1 - cos(3*pi*x) + 0.1*x^2 on [-5, 5].

    Oscillation plus a weak quadratic envelope: local minima near every
    even multiple of 1/3, unique global minimum f(0) = 0. Plain gradient
    descent from most starts lands in a nonzero local minimum.
    """

    def __init__(self, bounds: BoundsLike | None = None) -> None:
        self.dims = 1
        self.bounds = _normalize_bounds(bounds or ((-5.0, 5.0),), 1)

    def evaluate(self, x: Sequence[float]) -> float:
        v = x[0]
        return 1.0 - math.cos(3.0 * math.pi * v) + 0.1 * v * v


def multimodal1d(x: float) -> float:
    """Scalar form of :class:`Multimodal1D`."""
    return 1.0 - math.cos(3.0 * math.pi * x) + 0.1 * x * x


# ---------------------------------------------------------------------------
# XOR network: 2 inputs, 2 sigmoid hidden units with biases, 1 sigmoid
# output with NO output bias. Weight vector layout (8 entries):
#   (w11, w12, w21, w22, b1, b2, v1, v2)
# where hidden unit k computes sigmoid(wk1*x1 + wk2*x2 + bk) and the
# output is sigmoid(v1*h1 + v2*h2).
# ---------------------------------------------------------------------------

XOR_PATTERNS: tuple[tuple[float, float, float], ...] = (
    (0.0, 0.0, 0.0),
    (0.0, 1.0, 1.0),
    (1.0, 0.0, 1.0),
    (1.0, 1.0, 0.0),
)

# A verified weight set with SSE ~0.0052; all four patterns classify
# correctly at the 0.5 threshold. Found by pre-build numeric search: the
# net has no output bias, so the familiar OR/AND hidden-unit construction
# cannot push the (0,0) output off 0.5 and an asymmetric solution is
# required. Magnitudes up to 20, hence the default +/-20 weight box.
XOR_SOLUTION_WEIGHTS: tuple[float, ...] = (
    20.0, -20.0, 1.7, -1.7, 10.0, 0.0, -14.0, 20.0,
)

# Symmetric start: both hidden units identical, so full-batch gradient
# descent preserves the symmetry forever and stalls (the symmetric
# network cannot represent XOR).
XOR_STALL_WEIGHTS: tuple[float, ...] = (0.5,) * 8


def _sigmoid(z: float) -> float:
    # Split by sign so exp never overflows.
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def xor_forward(w: Sequence[float]) -> tuple[tuple[float, ...], tuple[tuple[float, float], ...]]:
    """Network outputs and hidden activations for the four XOR patterns."""
    if len(w) != 8:
        raise ValueError(f"expected 8 weights, got {len(w)}")
    w11, w12, w21, w22, b1, b2, v1, v2 = (float(a) for a in w)
    outputs = []
    hiddens = []
    for x1, x2, _ in XOR_PATTERNS:
        h1 = _sigmoid(w11 * x1 + w12 * x2 + b1)
        h2 = _sigmoid(w21 * x1 + w22 * x2 + b2)
        outputs.append(_sigmoid(v1 * h1 + v2 * h2))
        hiddens.append((h1, h2))
    return tuple(outputs), tuple(hiddens)


def xor_sse(w: Sequence[float]) -> float:
    """Sum of squared errors over the four XOR patterns; range [0, 4]."""
    outputs, _ = xor_forward(w)
    total = 0.0
    for (_, _, t), y in zip(XOR_PATTERNS, outputs):
        e = y - t
        total += e * e
    return total


def xor_grad(w: Sequence[float]) -> tuple[float, ...]:
    """Analytic gradient of :func:`xor_sse` by backpropagation."""
    w11, w12, w21, w22, b1, b2, v1, v2 = (float(a) for a in w)
    g = [0.0] * 8
    for x1, x2, t in XOR_PATTERNS:
        h1 = _sigmoid(w11 * x1 + w12 * x2 + b1)
        h2 = _sigmoid(w21 * x1 + w22 * x2 + b2)
        y = _sigmoid(v1 * h1 + v2 * h2)
        dy = 2.0 * (y - t) * y * (1.0 - y)
        g[6] += dy * h1
        g[7] += dy * h2
        d1 = dy * v1 * h1 * (1.0 - h1)
        d2 = dy * v2 * h2 * (1.0 - h2)
        g[0] += d1 * x1
        g[1] += d1 * x2
        g[2] += d2 * x1
        g[3] += d2 * x2
        g[4] += d1
        g[5] += d2
    return tuple(g)


@dataclass(frozen=True)
class GradientDescentResult:
    trace: tuple[tuple[int, float], ...]  # (step, sse), step 0 = initial
    weights: tuple[float, ...]
    diverged: bool


def gd_train(w0: Sequence[float], lr: float, steps: int) -> GradientDescentResult:
    """Full-batch gradient descent on xor_sse.

    The trace includes the initial error at step 0, so its length is
    steps + 1 unless a non-finite error terminates it early (flagged via
    ``diverged``).
    """
    if lr < 0.0:
        raise ValueError("lr must be >= 0")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    w = [float(a) for a in w0]
    trace = [(0, xor_sse(w))]
    diverged = False
    for step in range(1, steps + 1):
        grad = xor_grad(w)
        w = [wi - lr * gi for wi, gi in zip(w, grad)]
        sse = xor_sse(w)
        if not math.isfinite(sse):
            diverged = True
            break
        trace.append((step, sse))
    return GradientDescentResult(trace=tuple(trace), weights=tuple(w), diverged=diverged)


class XorNetwork(Objective):
    """xor_sse as an optimization target over the 8 network weights."""

    def __init__(self, bounds: BoundsLike | None = None) -> None:
        self.dims = 8
        self.bounds = _normalize_bounds(bounds or ((-20.0, 20.0),) * 8, 8)

    def evaluate(self, x: Sequence[float]) -> float:
        return xor_sse(x)


class SpinObjective(Objective):
    """Wrap an objective with calibrated per-evaluation busy-work.

    Emulates expensive objectives for speedup benchmarking: each call
    spins on the monotonic clock for ``spin_ns`` nanoseconds, then
    delegates. Values are unchanged, so traces stay identical to the
    unwrapped objective's.
    """

    def __init__(self, inner: Objective, spin_ns: int) -> None:
        if spin_ns < 0:
            raise ValueError("spin_ns must be >= 0")
        self.inner = inner
        self.spin_ns = int(spin_ns)
        self.dims = inner.dims
        self.bounds = inner.bounds

    def evaluate(self, x: Sequence[float]) -> float:
        deadline = time.perf_counter_ns() + self.spin_ns
        while time.perf_counter_ns() < deadline:
            pass
        return self.inner.evaluate(x)
