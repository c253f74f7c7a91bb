"""Fixed-point codec between real vectors and bit strings.

A candidate point is one flat bit string: each variable contributes a
``bits_per_var``-wide slice, written most-significant-bit first, slices
concatenated in declaration order (index 0 of the string is the MSB of
variable 0). Slices are read as unsigned indices into a uniform affine
grid over the variable's bounds.

Bit strings are tuples of 0/1 ints. Gray transforms apply to the entire
concatenated string, not per variable.
"""

from __future__ import annotations

from typing import Sequence

Bits = tuple[int, ...]


def as_bits(values: Sequence[int]) -> Bits:
    """Coerce to a validated bit tuple (every element 0 or 1, length >= 1)."""
    values = tuple(values)
    if not values:
        raise ValueError("bit string must be non-empty")
    if any(v not in (0, 1) for v in values):
        raise ValueError("bit string elements must be 0 or 1")
    return tuple(int(v) for v in values)


def to_gray(bits: Sequence[int]) -> Bits:
    """Reflected-binary transform: g[0] = s[0], g[k] = s[k-1] XOR s[k]."""
    g = list(bits)
    for k in range(len(g) - 1, 0, -1):
        g[k] ^= g[k - 1]
    return tuple(g)


def from_gray(bits: Sequence[int]) -> Bits:
    """Inverse transform, a prefix-XOR scan: s[k] = s[k-1] XOR g[k]."""
    s = list(bits)
    for k in range(1, len(s)):
        s[k] ^= s[k - 1]
    return tuple(s)


class Quantizer:
    """Uniform affine grid over a bounded box.

    Index k of a b-bit slice maps to ``lo + k * (hi - lo) / (2**b - 1)``,
    so both endpoints are exactly representable and boundary optima stay
    reachable. Instances are treated as immutable; resolution changes go
    through :meth:`with_bits_per_var`.
    """

    def __init__(self, dims: int, bits_per_var: int, bounds) -> None:
        if dims < 1:
            raise ValueError(f"dims must be >= 1, got {dims}")
        if bits_per_var < 1:
            raise ValueError(f"bits_per_var must be >= 1, got {bits_per_var}")
        bounds = tuple(bounds)
        if len(bounds) == 2 and not hasattr(bounds[0], "__len__"):
            bounds = (bounds,) * dims  # single (lo, hi) pair applies to every dim
        if len(bounds) != dims:
            raise ValueError(f"expected {dims} bounds pairs, got {len(bounds)}")
        norm = []
        for j, pair in enumerate(bounds):
            lo, hi = (float(pair[0]), float(pair[1]))
            if not lo < hi:
                raise ValueError(f"bounds[{j}]: need lo < hi, got ({lo}, {hi})")
            norm.append((lo, hi))
        self.dims = dims
        self.bits_per_var = bits_per_var
        self.bounds: tuple[tuple[float, float], ...] = tuple(norm)
        levels = (1 << bits_per_var) - 1
        self._lo = tuple(lo for lo, _ in norm)
        self._hi = tuple(hi for _, hi in norm)
        self._step = tuple((hi - lo) / levels for lo, hi in norm)

    @property
    def n_bits(self) -> int:
        """Total bit-string length L = dims * bits_per_var."""
        return self.dims * self.bits_per_var

    @property
    def max_index(self) -> int:
        return (1 << self.bits_per_var) - 1

    @property
    def grid_step(self) -> tuple[float, ...]:
        """Per-dimension spacing (hi - lo) / (2**b - 1)."""
        return self._step

    def with_bits_per_var(self, bits_per_var: int) -> "Quantizer":
        return Quantizer(self.dims, bits_per_var, self.bounds)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Quantizer):
            return NotImplemented
        return (
            self.dims == other.dims
            and self.bits_per_var == other.bits_per_var
            and self.bounds == other.bounds
        )

    def __repr__(self) -> str:
        return (
            f"Quantizer(dims={self.dims}, bits_per_var={self.bits_per_var}, "
            f"bounds={self.bounds})"
        )


def encode_point(x: Sequence[float], quantizer: Quantizer) -> Bits:
    """Quantize a real vector to a bit string, clamping to the bounds.

    k_j = round((clamp(x_j) - lo_j) / (hi_j - lo_j) * (2**b - 1)), written
    MSB-first into slice j. Out-of-range coordinates are clamped rather
    than rejected so user-supplied start points never abort a run.
    """
    if len(x) != quantizer.dims:
        raise ValueError(f"expected {quantizer.dims} coordinates, got {len(x)}")
    b = quantizer.bits_per_var
    m = quantizer.max_index
    bits: list[int] = []
    for xj, lo, hi in zip(x, quantizer._lo, quantizer._hi):
        xj = min(max(float(xj), lo), hi)
        k = round((xj - lo) / (hi - lo) * m)
        bits.extend((k >> shift) & 1 for shift in range(b - 1, -1, -1))
    return tuple(bits)


def decode_point(bits: Sequence[int], quantizer: Quantizer) -> tuple[float, ...]:
    """Map a bit string back to the real vector on the quantizer's grid."""
    b = quantizer.bits_per_var
    if len(bits) != quantizer.dims * b:
        raise ValueError(
            f"bit string length {len(bits)} != dims*bits_per_var = "
            f"{quantizer.dims * b}"
        )
    lo = quantizer._lo
    step = quantizer._step
    out: list[float] = []
    pos = 0
    for j in range(quantizer.dims):
        k = 0
        for i in range(pos, pos + b):
            k = (k << 1) | bits[i]
        out.append(lo[j] + k * step[j])
        pos += b
    return tuple(out)


def slice_indices(bits: Sequence[int], quantizer: Quantizer) -> tuple[int, ...]:
    """Per-dimension unsigned grid indices of a bit string."""
    b = quantizer.bits_per_var
    if len(bits) != quantizer.dims * b:
        raise ValueError("bit string length does not match quantizer")
    out = []
    for j in range(quantizer.dims):
        k = 0
        for i in range(j * b, (j + 1) * b):
            k = (k << 1) | bits[i]
        out.append(k)
    return tuple(out)


def requantize(bits: Sequence[int], q_old: Quantizer, q_new: Quantizer) -> Bits:
    """Re-express a bit string on a finer grid (same dims and bounds).

    Equivalent to encode_point(decode_point(bits, q_old), q_new); the
    decoded value moves by at most half a new-grid step per dimension.
    """
    if q_new.bits_per_var <= q_old.bits_per_var:
        raise ValueError("requantize requires q_new.bits_per_var > q_old.bits_per_var")
    if q_new.dims != q_old.dims or q_new.bounds != q_old.bounds:
        raise ValueError("requantize requires identical dims and bounds")
    return encode_point(decode_point(bits, q_old), q_new)
