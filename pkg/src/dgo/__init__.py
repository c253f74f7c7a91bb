"""Distributed global optimization over gray-coded bit strings.

A deterministic population-per-iteration minimizer: each step inverts
segments of the gray-coded parent bit string to generate 2L-1 children,
keeps the deepest strict improvement, and raises the fixed-point
resolution when stuck. Evaluation backends reproduce the original
master/worker parallel structure (sequential baseline, process pool,
multi-start clusters).
"""

from .backends import (MultistartResult, SequentialBackend, WorkerPoolBackend,
                       evaluate_batch, make_backend, partition_children,
                       reduce_min, run_multistart)
from .encoding import (Bits, Quantizer, as_bits, decode_point, encode_point,
                       from_gray, requantize, slice_indices, to_gray)
from .engine import (RunConfig, RunResult, SearchState, StepKind, StepOutcome,
                     TerminationReason, TraceRecord, dgo_step,
                     increase_resolution, run)
from .estimators import DGOOptimizer, FixedPointEncoder
from .neighborhood import ChildSet, generate_children, segment_masks
from .objectives import (Multimodal1D, Objective, Quadratic, Shekel,
                         SpinObjective, XorNetwork, gd_train, multimodal1d,
                         xor_forward, xor_grad, xor_sse)

__version__ = "0.1.0"

__all__ = [
    "Bits",
    "ChildSet",
    "DGOOptimizer",
    "FixedPointEncoder",
    "Multimodal1D",
    "MultistartResult",
    "Objective",
    "Quadratic",
    "Quantizer",
    "RunConfig",
    "RunResult",
    "SearchState",
    "SequentialBackend",
    "Shekel",
    "SpinObjective",
    "StepKind",
    "StepOutcome",
    "TerminationReason",
    "TraceRecord",
    "WorkerPoolBackend",
    "XorNetwork",
    "as_bits",
    "decode_point",
    "dgo_step",
    "encode_point",
    "evaluate_batch",
    "from_gray",
    "gd_train",
    "generate_children",
    "increase_resolution",
    "make_backend",
    "multimodal1d",
    "partition_children",
    "reduce_min",
    "requantize",
    "run",
    "run_multistart",
    "segment_masks",
    "slice_indices",
    "to_gray",
    "xor_forward",
    "xor_grad",
    "xor_sse",
]
