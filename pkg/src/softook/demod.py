"""Envelope detection and per-bit LLRs for Manchester-coded OOK.

For period ``i`` with first-half magnitudes ``r[0:T]`` and second-half
magnitudes ``r[T:2T]``:

* ``exact``: ``sum log I0(2|h||r|/s2)`` over the first half minus the same
  over the second half, where ``s2`` is the complex noise power;
* ``approx_csi``: the large-argument limit ``log I0(x) ~ x``, i.e.
  ``2|h|/s2 * (sum r[0:T] - sum r[T:2T])``;
* ``approx_scale_free``: the same difference without the ``2|h|/s2`` factor;
* ``hard``: ``+1`` if the first-half sum is at least the second-half sum,
  else ``-1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from softook._backend import kernels
from softook.core import ChannelRealization, ComplexSampleFrame, DomainError, StructuralError

ORACLE_MAX_X = 700.0
_ORACLE_NODES = 4096


class LlrMethod(str, Enum):
    EXACT = "exact"
    APPROX_CSI = "approx_csi"
    APPROX_SCALE_FREE = "approx_scale_free"
    HARD = "hard"


@dataclass(frozen=True)
class EnvelopeFrame:
    magnitudes: np.ndarray
    samples_per_half_bit: int

    def __post_init__(self):
        mags = np.asarray(self.magnitudes, dtype=np.float64)
        T = int(self.samples_per_half_bit)
        if T < 1 or mags.ndim != 1 or mags.size % (2 * T):
            raise StructuralError(f"envelope length {mags.size} is not a multiple of 2T")
        if not np.all(np.isfinite(mags)) or np.any(mags < 0):
            raise DomainError("magnitudes must be finite and non-negative")
        object.__setattr__(self, "magnitudes", mags)

    @property
    def periods(self) -> int:
        return self.magnitudes.size // (2 * self.samples_per_half_bit)

    def halves(self) -> tuple[np.ndarray, np.ndarray]:
        """``(first, second)`` arrays of shape ``(periods, T)``."""
        T = self.samples_per_half_bit
        grid = self.magnitudes.reshape(-1, 2 * T)
        return grid[:, :T], grid[:, T:]


def envelope(rx: ComplexSampleFrame) -> EnvelopeFrame:
    return EnvelopeFrame(np.abs(rx.samples), rx.samples_per_half_bit)


def log_bessel_i0(x):
    """Natural log of the modified Bessel function I0, in log domain.

    Uses the power series below x = 17 and the large-argument expansion
    above it, so it stays finite for arguments far beyond where I0 itself
    overflows.
    """
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError("log_bessel_i0 requires finite x >= 0")
    out = kernels.log_i0(arr)
    return float(out) if np.ndim(x) == 0 else out


def log_bessel_i0_oracle(x):
    """Reference ``log I0(x)`` by direct quadrature of the integral form.

    ``I0(x) = e^x / pi * int_0^pi exp(x (cos z - 1)) dz``; the integrand is
    smooth, even and periodic, so the trapezoidal rule converges
    geometrically. Test use only.
    """
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > ORACLE_MAX_X):
        raise DomainError(f"oracle supports 0 <= x <= {ORACLE_MAX_X}")
    z = np.linspace(0.0, np.pi, _ORACLE_NODES + 1)
    w = np.full(z.size, 1.0 / _ORACLE_NODES)
    w[0] = w[-1] = 0.5 / _ORACLE_NODES
    cm1 = np.cos(z) - 1.0
    flat = arr.ravel()
    out = np.empty_like(flat)
    for start in range(0, flat.size, 256):
        xs = flat[start : start + 256]
        out[start : start + 256] = xs + np.log(np.exp(np.outer(xs, cm1)) @ w)
    out = out.reshape(arr.shape)
    return float(out) if np.ndim(x) == 0 else out


def _check_lengths(env: EnvelopeFrame, ch: ChannelRealization):
    if ch.gains.size != env.periods:
        raise StructuralError(
            f"channel has {ch.gains.size} periods but envelope has {env.periods}"
        )


def llr_exact(env: EnvelopeFrame, ch: ChannelRealization) -> np.ndarray:
    _check_lengths(env, ch)
    scale = (2.0 * np.abs(ch.gains) / ch.noise_power)[:, None]
    first, second = env.halves()
    return (
        kernels.log_i0(scale * first).sum(axis=1)
        - kernels.log_i0(scale * second).sum(axis=1)
    )


def llr_approx_csi(env: EnvelopeFrame, ch: ChannelRealization) -> np.ndarray:
    _check_lengths(env, ch)
    return 2.0 * np.abs(ch.gains) / ch.noise_power * llr_approx_scale_free(env)


def llr_approx_scale_free(env: EnvelopeFrame) -> np.ndarray:
    first, second = env.halves()
    return first.sum(axis=1) - second.sum(axis=1)


def llr_hard(env: EnvelopeFrame) -> np.ndarray:
    first, second = env.halves()
    return np.where(first.sum(axis=1) >= second.sum(axis=1), 1.0, -1.0)


def compute_llrs(
    method: LlrMethod | str, env: EnvelopeFrame, ch: ChannelRealization | None = None
) -> np.ndarray:
    method = LlrMethod(method)
    if method is LlrMethod.EXACT:
        return llr_exact(env, ch)
    if method is LlrMethod.APPROX_CSI:
        return llr_approx_csi(env, ch)
    if method is LlrMethod.APPROX_SCALE_FREE:
        return llr_approx_scale_free(env)
    return llr_hard(env)
