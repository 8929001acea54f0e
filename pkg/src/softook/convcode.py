"""Rate-1/2 feedforward convolutional code with a soft-input Viterbi decoder."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from softook._backend import kernels
from softook.core import StructuralError, as_bits, as_llrs


def parse_generators(text: str) -> tuple[int, int]:
    """Parse an octal generator pair such as ``"15,13"``."""
    parts = [p.strip() for p in str(text).replace("[", "").replace("]", "").split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected two octal generators, got {text!r}")
    try:
        return int(parts[0], 8), int(parts[1], 8)
    except ValueError:
        raise ValueError(f"generators must be octal integers, got {text!r}") from None


@dataclass(frozen=True)
class ConvCode:
    """Generator taps, MSB on the current input bit.

    Octal 15 is ``1101``: output ``c1[k] = a[k] ^ a[k-1] ^ a[k-3]``.
    """

    generators: tuple[int, int] = (0o15, 0o13)
    memory: int = field(init=False)
    outputs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        g1, g2 = (int(g) for g in self.generators)
        if g1 <= 0 or g2 <= 0:
            raise ValueError("generators must be positive")
        m = max(g1.bit_length(), g2.bit_length()) - 1
        if m < 1:
            raise ValueError("code memory must be at least 1")
        if not (g1 & 1 or g2 & 1):
            raise ValueError("at least one generator needs its lowest-order tap")
        object.__setattr__(self, "generators", (g1, g2))
        object.__setattr__(self, "memory", m)
        # outputs[state, u] = 2*c1 + c2; state holds a[k-1] as its MSB
        n_states = 1 << m
        table = np.zeros((n_states, 2), dtype=np.int8)
        for s in range(n_states):
            for u in (0, 1):
                reg = (u << m) | s
                c1 = bin(reg & g1).count("1") & 1
                c2 = bin(reg & g2).count("1") & 1
                table[s, u] = 2 * c1 + c2
        table.setflags(write=False)
        object.__setattr__(self, "outputs", table)

    @property
    def n_states(self) -> int:
        return 1 << self.memory

    def coded_length(self, n_info: int) -> int:
        return 2 * (n_info + self.memory)

    def info_length(self, n_coded: int) -> int:
        if n_coded % 2 or n_coded // 2 < self.memory:
            raise StructuralError(
                f"{n_coded} is not a valid codeword length for memory {self.memory}"
            )
        return n_coded // 2 - self.memory

    def taps(self) -> tuple[np.ndarray, np.ndarray]:
        """Tap vectors indexed by delay (index 0 = current input)."""
        m = self.memory
        return tuple(
            np.array([(g >> (m - d)) & 1 for d in range(m + 1)], dtype=np.uint8)
            for g in self.generators
        )


DEFAULT_CODE = ConvCode()


@dataclass(frozen=True)
class TrellisPath:
    decoded_bits: np.ndarray
    metric: float


def encode(info, code: ConvCode = DEFAULT_CODE) -> np.ndarray:
    """Zero-start, zero-tail encoding. Output pairs are ``(c1, c2)``."""
    a = np.concatenate([as_bits(info), np.zeros(code.memory, dtype=np.uint8)])
    out = np.empty(2 * a.size, dtype=np.uint8)
    for j, taps in enumerate(code.taps()):
        out[j::2] = np.convolve(a, taps)[: a.size] & 1
    return out


def path_metric(info, llrs, code: ConvCode = DEFAULT_CODE) -> float:
    """Correlation ``sum((2c - 1) * llr)`` of the codeword for ``info``."""
    c = encode(info, code).astype(np.float64)
    return float(np.dot(2.0 * c - 1.0, as_llrs(llrs)))


def viterbi_decode(llrs, code: ConvCode = DEFAULT_CODE) -> TrellisPath:
    """Maximum-likelihood decoding over zero-terminated codewords.

    Positive LLRs favour coded bit 1. Among codewords with equal metric the
    lexicographically smallest information sequence wins.
    """
    llrs = as_llrs(llrs)
    n_info = code.info_length(llrs.size)
    bits, metric = kernels.viterbi(llrs, code.outputs, n_info, code.memory)
    return TrellisPath(np.asarray(bits, dtype=np.uint8), metric)


def hard_decode(llrs, code: ConvCode = DEFAULT_CODE) -> TrellisPath:
    """Viterbi on sign-quantized LLRs (0 counts as +1)."""
    llrs = as_llrs(llrs)
    return viterbi_decode(np.where(llrs >= 0, 1.0, -1.0), code)
