"""scikit-learn style wrappers around the optimizer and the codec.

These give the library the usual estimator surface (``get_params`` /
``set_params``, ``clone`` compatibility, fitted attributes with trailing
underscores) so it slots into pipelines and parameter searches.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .backends import make_backend, run_multistart
from .encoding import Quantizer, decode_point, encode_point, from_gray, to_gray
from .engine import RunConfig, run
from .objectives import Objective


def _check_objective(objective) -> None:
    for attr in ("dims", "bounds", "evaluate"):
        if not hasattr(objective, attr):
            raise TypeError(
                f"objective must expose dims, bounds and evaluate; "
                f"missing {attr!r} on {type(objective).__name__}"
            )


class DGOOptimizer(BaseEstimator):
    """Deterministic derivative-free global minimizer.

    From a single parent point, every iteration deterministically
    generates 2L-1 candidates by inverting segments of the gray-coded
    parent bit string, accepts the deepest strict improvement, and
    escalates the encoding resolution when stuck.

    Parameters
    ----------
    bits_init : int, default=4
        Starting bits per variable.
    bits_max : int, default=16
        Resolution ceiling; the run terminates when stuck at this width.
    max_evals : int, default=100000
        Hard cap on objective evaluations.
    seed : int, default=0
        Seed for the random initial point (ignored when initial_point is
        given). Identical seeds give identical runs.
    initial_point : sequence of float, optional
        Explicit start; out-of-box coordinates are clamped.
    clusters : int, default=1
        Independent multi-start runs (seeds seed, seed+1, ...) reduced by
        final minimum.
    backend : str or backend instance, default="seq"
        "seq", "pool", "pool:W", or a backend object. String-built pools
        are closed after fit.

    Attributes
    ----------
    best_point_ : ndarray of shape (dims,)
        Deepest decoded point found.
    best_value_ : float
        Objective value at ``best_point_``.
    trace_ : tuple of TraceRecord
        Per-iteration trace of the winning run.
    n_evals_ : int
        Total objective evaluations across all clusters.
    result_ : RunResult or MultistartResult
        Full outcome object.
    """

    def __init__(self, bits_init=4, bits_max=16, max_evals=100_000, seed=0,
                 initial_point=None, clusters=1, backend="seq"):
        self.bits_init = bits_init
        self.bits_max = bits_max
        self.max_evals = max_evals
        self.seed = seed
        self.initial_point = initial_point
        self.clusters = clusters
        self.backend = backend

    def fit(self, objective: Objective, y=None):
        """Minimize the objective. Returns self."""
        _check_objective(objective)
        config = RunConfig(
            bits_init=self.bits_init,
            bits_max=self.bits_max,
            max_evals=self.max_evals,
            seed=self.seed,
            initial_point=None if self.initial_point is None
            else tuple(self.initial_point),
        )
        backend = make_backend(self.backend)
        owns_backend = isinstance(self.backend, str)
        try:
            if self.clusters == 1:
                result = run(config, objective, backend)
                best = result
                self.n_evals_ = result.evals
            else:
                result = run_multistart(config, objective, self.clusters, backend)
                best = result.best
                self.n_evals_ = sum(r.evals for r in result.runs)
        finally:
            if owns_backend:
                backend.close()
        self.result_ = result
        self.best_point_ = np.asarray(best.best_point, dtype=float)
        self.best_value_ = best.best_value
        self.trace_ = best.trace
        return self

    def optimum(self) -> tuple[np.ndarray, float]:
        """(best_point_, best_value_) of the fitted run."""
        check_is_fitted(self, "best_value_")
        return self.best_point_, self.best_value_


class FixedPointEncoder(TransformerMixin, BaseEstimator):
    """Quantize real-valued rows to fixed-point bit rows and back.

    Parameters
    ----------
    bits_per_var : int, default=8
        Bits per feature.
    bounds : sequence of (lo, hi) pairs, optional
        Per-feature box. When omitted, fit() infers each feature's
        min/max from the data (constant features get a unit-wide box).
    gray : bool, default=False
        Emit gray-coded rows instead of plain offset-binary.

    Attributes
    ----------
    quantizer_ : Quantizer
        The fitted grid.
    n_features_in_ : int
    """

    def __init__(self, bits_per_var=8, bounds=None, gray=False):
        self.bits_per_var = bits_per_var
        self.bounds = bounds
        self.gray = gray

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        n_features = X.shape[1]
        if self.bounds is not None:
            bounds = [(float(lo), float(hi)) for lo, hi in self.bounds]
        else:
            bounds = []
            for j in range(n_features):
                lo, hi = float(X[:, j].min()), float(X[:, j].max())
                if lo == hi:
                    lo, hi = lo - 0.5, hi + 0.5
                bounds.append((lo, hi))
        self.quantizer_ = Quantizer(n_features, self.bits_per_var, bounds)
        self.n_features_in_ = n_features
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "quantizer_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, encoder was fitted with "
                f"{self.n_features_in_}"
            )
        rows = []
        for row in X:
            bits = encode_point(row, self.quantizer_)
            rows.append(to_gray(bits) if self.gray else bits)
        return np.asarray(rows, dtype=np.uint8)

    def inverse_transform(self, B) -> np.ndarray:
        check_is_fitted(self, "quantizer_")
        B = check_array(B, dtype=np.uint8)
        if B.shape[1] != self.quantizer_.n_bits:
            raise ValueError(
                f"bit rows have width {B.shape[1]}, expected "
                f"{self.quantizer_.n_bits}"
            )
        if np.any(B > 1):
            raise ValueError("bit rows must contain only 0 and 1")
        rows = []
        for row in B:
            bits = tuple(int(v) for v in row)
            if self.gray:
                bits = from_gray(bits)
            rows.append(decode_point(bits, self.quantizer_))
        return np.asarray(rows, dtype=float)
