"""Pre-build brute-force oracles for the objective suite.

Establishes the global optima that the acceptance tests assert against:
an exhaustive scan of the full 8-bit grid (2^32 points for the 4-D Shekel
configuration), followed by local refinement of the best cell. Run once
before freezing test constants; takes a few minutes.

Requires scipy (refinement only); scipy is not a package dependency.
"""

from __future__ import annotations

import time

import numpy as np
from scipy.optimize import minimize

from dgo.objectives import (SHEKEL5_FOCI, SHEKEL5_SHIFTS, Multimodal1D,
                            Shekel, multimodal1d)


def shekel_grid_scan(bits: int = 8):
    """Exhaustive scan of the 4-D Shekel on the 2^bits-per-dim grid.

    Vectorized by chunking over the first dimension: each chunk holds the
    (g, g, g) lattice of the remaining three dimensions.
    """
    n = 1 << bits
    lo, hi = 0.0, 10.0
    g = lo + np.arange(n) * (hi - lo) / (n - 1)
    foci = np.asarray(SHEKEL5_FOCI)
    shifts = np.asarray(SHEKEL5_SHIFTS)

    # per-focus squared distances along each axis, shape (m, n)
    d = (g[None, :] - foci[:, :, None]) ** 2  # (m, 4, n)

    best_val = np.inf
    best_idx = None
    for i0 in range(n):
        total = np.zeros((n, n, n))
        for j in range(len(shifts)):
            r = (d[j, 0, i0]
                 + d[j, 1][:, None, None]
                 + d[j, 2][None, :, None]
                 + d[j, 3][None, None, :])
            total -= 1.0 / (r + shifts[j])
        flat = int(np.argmin(total))
        val = float(total.flat[flat])
        if val < best_val:
            best_val = val
            i1, i2, i3 = np.unravel_index(flat, (n, n, n))
            best_idx = (i0, int(i1), int(i2), int(i3))
    point = tuple(float(g[k]) for k in best_idx)
    return point, best_val, best_idx


def refine(objective, x0):
    res = minimize(lambda x: objective.evaluate(x), np.asarray(x0),
                   method="Nelder-Mead",
                   options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 50_000,
                            "maxfev": 50_000})
    return tuple(float(v) for v in res.x), float(res.fun)


def main() -> None:
    t0 = time.time()
    grid_point, grid_val, grid_idx = shekel_grid_scan(bits=8)
    print(f"shekel 8-bit grid minimum: f={grid_val!r} at {grid_point} "
          f"(indices {grid_idx}, {time.time() - t0:.0f}s)")
    x_star, f_star = refine(Shekel(), grid_point)
    print(f"shekel refined optimum:    f={f_star!r}")
    print(f"shekel refined point:      {x_star!r}")

    xs = np.linspace(-5.0, 5.0, 1 << 8)
    vals = [multimodal1d(float(x)) for x in xs]
    k = int(np.argmin(vals))
    m_point, m_val = refine(Multimodal1D(), (float(xs[k]),))
    print(f"multimodal1d grid minimum: f={min(vals)!r} at x={float(xs[k])!r}")
    print(f"multimodal1d refined:      f={m_val!r} at x={m_point[0]!r}")


if __name__ == "__main__":
    main()
