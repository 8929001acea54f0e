"""Manchester chip mapping and OOK sample synthesis."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from softook.core import ComplexSampleFrame, RngStream, StructuralError, as_bits


class PhaseMode(str, Enum):
    NONE = "none"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class WaveformConfig:
    samples_per_half_bit: int = 2
    phase_mode: PhaseMode = PhaseMode.UNIFORM
    on_amplitude: float = 1.0

    def __post_init__(self):
        if int(self.samples_per_half_bit) < 1:
            raise ValueError("samples_per_half_bit must be >= 1")
        object.__setattr__(self, "phase_mode", PhaseMode(self.phase_mode))


def manchester_encode(coded) -> np.ndarray:
    """Bit 1 becomes chips (1, 0); bit 0 becomes (0, 1)."""
    b = as_bits(coded)
    chips = np.empty(2 * b.size, dtype=np.uint8)
    chips[0::2] = b
    chips[1::2] = 1 - b
    return chips


def manchester_decode_hard(chips) -> np.ndarray:
    c = as_bits(chips)
    if c.size % 2:
        raise StructuralError("Manchester chip sequence must have even length")
    first, second = c[0::2], c[1::2]
    bad = np.flatnonzero(first == second)
    if bad.size:
        i = int(bad[0])
        raise StructuralError(
            f"invalid Manchester pair ({first[i]}, {second[i]}) at bit {i}"
        )
    return first.copy()


def synthesize(chips, cfg: WaveformConfig, rng: RngStream) -> ComplexSampleFrame:
    """Repeat each chip ``T`` times and apply the per-sample random phase."""
    c = as_bits(chips)
    if c.size % 2:
        raise StructuralError("chip sequence must have even length")
    T = int(cfg.samples_per_half_bit)
    samples = np.repeat(c.astype(np.float64) * cfg.on_amplitude, T).astype(np.complex128)
    if cfg.phase_mode is PhaseMode.UNIFORM:
        theta = rng.generator().uniform(0.0, 2.0 * np.pi, size=samples.size)
        samples *= np.exp(1j * theta)
    return ComplexSampleFrame(samples, T)
