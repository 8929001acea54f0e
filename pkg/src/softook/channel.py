"""AWGN and block Rayleigh fading channels."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from softook.core import ChannelRealization, ComplexSampleFrame, RngStream, split_stream


class ChannelKind(str, Enum):
    AWGN = "awgn"
    BLOCK_RAYLEIGH = "block_rayleigh"


class BlockUnit(str, Enum):
    SAMPLES = "samples"
    PERIODS = "periods"


@dataclass(frozen=True)
class ChannelConfig:
    """Channel parameters.

    With ``fading_block_unit="samples"`` a Manchester period belongs to the
    fading block that contains its first sample, so gains stay constant
    within every period and block edges snap to the period grid.
    """

    kind: ChannelKind = ChannelKind.AWGN
    noise_power: float = 1.0
    fading_block_length: int = 1003
    fading_block_unit: BlockUnit = BlockUnit.SAMPLES

    def __post_init__(self):
        object.__setattr__(self, "kind", ChannelKind(self.kind))
        object.__setattr__(self, "fading_block_unit", BlockUnit(self.fading_block_unit))
        if not self.noise_power > 0:
            raise ValueError("noise_power must be > 0")
        if int(self.fading_block_length) < 1:
            raise ValueError("fading_block_length must be >= 1")


def block_index(periods: int, samples_per_half_bit: int, cfg: ChannelConfig) -> np.ndarray:
    """Fading block index of every Manchester period."""
    start = np.arange(periods)
    if cfg.fading_block_unit is BlockUnit.SAMPLES:
        start = start * (2 * samples_per_half_bit)
    return start // int(cfg.fading_block_length)


def complex_normal(gen: np.random.Generator, size, power: float = 1.0) -> np.ndarray:
    """CN(0, power): real and imaginary parts each carry power / 2."""
    z = gen.standard_normal((2,) + tuple(np.atleast_1d(size)))
    return np.sqrt(power / 2.0) * (z[0] + 1j * z[1])


def draw_gains(periods: int, samples_per_half_bit: int, cfg: ChannelConfig, rng: RngStream) -> np.ndarray:
    if cfg.kind is ChannelKind.AWGN:
        return np.ones(periods, dtype=np.complex128)
    blocks = block_index(periods, samples_per_half_bit, cfg)
    n_blocks = int(blocks[-1]) + 1 if periods else 0
    return complex_normal(rng.generator(), n_blocks)[blocks]


def apply(tx: ComplexSampleFrame, cfg: ChannelConfig, rng: RngStream):
    """Return ``(rx, realization)`` for ``r = h * x + n``.

    Fading and noise come from separate child streams so that swapping the
    channel kind leaves the noise draw unchanged.
    """
    gains = draw_gains(tx.periods, tx.samples_per_half_bit, cfg, split_stream(rng, 0))
    per_sample = np.repeat(gains, 2 * tx.samples_per_half_bit)
    noise = complex_normal(split_stream(rng, 1).generator(), tx.samples.size, cfg.noise_power)
    rx = ComplexSampleFrame(per_sample * tx.samples + noise, tx.samples_per_half_bit)
    return rx, ChannelRealization(gains, cfg.noise_power)
