"""Shared types, errors, seeding and SNR conversion.

Bits are carried as ``numpy.uint8`` arrays, LLRs as ``float64`` arrays and
baseband samples as ``complex128`` arrays. Index 0 is always the first
element on air.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RNG_ALGORITHM = f"numpy.random.PCG64/SeedSequence(entropy=[seed, stream_id]) numpy=={np.__version__}"

_MASK64 = (1 << 64) - 1


class StructuralError(ValueError):
    """Input has the wrong shape, length or layout for the operation."""


class DomainError(ValueError):
    """Numeric argument outside the domain of a function."""


class RangeError(ValueError):
    """Requested level or value is not covered by the data."""


def as_bits(bits) -> np.ndarray:
    """Validate and convert a sequence of 0/1 values to a uint8 array."""
    arr = np.asarray(bits)
    if arr.ndim != 1:
        raise StructuralError(f"bit vector must be 1-D, got shape {arr.shape}")
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise StructuralError("bit vector contains values other than 0 and 1")
    return arr.astype(np.uint8, copy=False)


def as_llrs(llrs) -> np.ndarray:
    arr = np.asarray(llrs, dtype=np.float64)
    if arr.ndim != 1:
        raise StructuralError(f"LLR vector must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("LLR vector contains non-finite values")
    return arr


@dataclass(frozen=True)
class ComplexSampleFrame:
    """Baseband samples grouped into Manchester periods of ``2 * T`` samples."""

    samples: np.ndarray
    samples_per_half_bit: int

    def __post_init__(self):
        if self.samples_per_half_bit < 1:
            raise StructuralError("samples_per_half_bit must be >= 1")
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.ndim != 1 or samples.size % (2 * self.samples_per_half_bit):
            raise StructuralError(
                f"frame length {samples.size} is not a multiple of 2T = "
                f"{2 * self.samples_per_half_bit}"
            )
        object.__setattr__(self, "samples", samples)

    @property
    def periods(self) -> int:
        return self.samples.size // (2 * self.samples_per_half_bit)


@dataclass(frozen=True)
class ChannelRealization:
    """Per-period complex gains and the noise power used to draw a frame."""

    gains: np.ndarray
    noise_power: float

    def __post_init__(self):
        if not self.noise_power > 0:
            raise DomainError("noise_power must be > 0")
        object.__setattr__(self, "gains", np.asarray(self.gains, dtype=np.complex128))


def _mix64(z: int) -> int:
    # splitmix64 finalizer, a bijection on 64-bit integers
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class RngStream:
    """A named, reproducible random stream.

    The pair ``(seed, stream_id)`` fully determines the sample sequence of
    :meth:`generator`.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "seed", int(self.seed) & _MASK64)
        object.__setattr__(self, "stream_id", int(self.stream_id) & _MASK64)

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=[self.seed, self.stream_id])
        return np.random.Generator(np.random.PCG64(ss))


def split_stream(parent: RngStream, child_id: int) -> RngStream:
    """Derive a child stream.

    The map ``child_id -> stream_id`` is a bijection on 64-bit integers for a
    fixed parent, so distinct children never collide with each other.
    """
    child = _mix64(parent.stream_id ^ _mix64((int(child_id) + 1) & _MASK64))
    if child == parent.stream_id:
        # happens for exactly one child_id out of 2**64
        child = _mix64(child)
    return RngStream(parent.seed, child)


def snr_db_to_noise_power(snr_db: float) -> float:
    """Complex noise power per sample for unit on-amplitude OOK."""
    return 10.0 ** (-float(snr_db) / 10.0)


def noise_power_to_snr_db(noise_power: float) -> float:
    if not noise_power > 0:
        raise DomainError("noise_power must be > 0")
    return -10.0 * np.log10(noise_power)
