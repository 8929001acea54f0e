"""Rectangular row-in/column-out block interleaver."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from softook.core import StructuralError


@dataclass(frozen=True)
class InterleaverSpec:
    """Write row-wise into rows of ``block_size`` cells, read column-wise.

    The last row may be short; the column read skips its empty cells.
    """

    block_size: int
    total_length: int

    def __post_init__(self):
        if int(self.block_size) < 1:
            raise ValueError("block_size must be >= 1")
        if int(self.total_length) < 0:
            raise ValueError("total_length must be >= 0")

    @property
    def rows(self) -> int:
        return -(-self.total_length // self.block_size)

    @cached_property
    def permutation(self) -> np.ndarray:
        """``out[j] = seq[permutation[j]]``."""
        idx = np.arange(self.total_length)
        # column-major order of (col, row) for the row-major cell index
        order = np.lexsort((idx // self.block_size, idx % self.block_size))
        order.setflags(write=False)
        return order

    @cached_property
    def inverse(self) -> np.ndarray:
        inv = np.empty(self.total_length, dtype=np.intp)
        inv[self.permutation] = np.arange(self.total_length)
        inv.setflags(write=False)
        return inv


def _check(seq, spec: InterleaverSpec) -> np.ndarray:
    arr = np.asarray(seq)
    if arr.ndim != 1 or arr.size != spec.total_length:
        raise StructuralError(
            f"sequence length {arr.size} does not match interleaver length {spec.total_length}"
        )
    return arr


def interleave(seq, spec: InterleaverSpec) -> np.ndarray:
    return _check(seq, spec)[spec.permutation]


def deinterleave(seq, spec: InterleaverSpec) -> np.ndarray:
    return _check(seq, spec)[spec.inverse]
