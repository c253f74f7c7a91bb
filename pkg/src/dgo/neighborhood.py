"""Deterministic child generation by segment inversion in the gray domain.

A parent of length L has exactly 2L-1 children: gray-code the whole
string, XOR one segment mask, and transform back. Each child depends only
on the parent, so the batch can be built or evaluated in any order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .encoding import Bits, from_gray, to_gray


@dataclass(frozen=True)
class ChildSet:
    """The 2L-1 candidates generated from one parent, in canonical order."""

    parent: Bits
    children: tuple[Bits, ...]

    def __len__(self) -> int:
        return len(self.children)


@lru_cache(maxsize=None)
def segment_masks(length: int) -> tuple[Bits, ...]:
    """Canonical inversion masks for bit strings of the given length.

    Order: the L single-bit masks, MSB to LSB, then the L-1 suffix masks
    from the full string down to the final two bits. This family gives
    exactly 2L-1 distinct nonzero masks, mixing fine moves (a single gray
    bit, i.e. one binary suffix complement) with coarse alternating-flip
    moves, and degenerates to the single mask [1] at L = 1.
    """
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    masks: list[Bits] = []
    for i in range(length):
        masks.append(tuple(1 if k == i else 0 for k in range(length)))
    for i in range(length - 1):
        masks.append(tuple(0 if k < i else 1 for k in range(length)))
    return tuple(masks)


def generate_children(parent: Sequence[int]) -> ChildSet:
    """Apply every canonical mask to the gray-coded parent.

    Children are pairwise distinct and never equal the parent: the masks
    are distinct and nonzero, and XOR plus the gray transforms are
    bijections.
    """
    parent = tuple(parent)
    gray = to_gray(parent)
    children = tuple(
        from_gray(tuple(g ^ m for g, m in zip(gray, mask)))
        for mask in segment_masks(len(parent))
    )
    return ChildSet(parent=parent, children=children)
