"""Welch PSD estimates and spectral flatness of baseband frames."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from softook.core import ComplexSampleFrame, DomainError, StructuralError


@dataclass(frozen=True)
class PsdEstimate:
    freqs: np.ndarray  # cycles/sample, ascending over [-0.5, 0.5)
    psd_db: np.ndarray
    params: dict

    @property
    def psd_linear(self) -> np.ndarray:
        return 10.0 ** (self.psd_db / 10.0)

    def total_power(self) -> float:
        """Integral of the density over one period of normalized frequency."""
        return float(self.psd_linear.sum() * (self.freqs[1] - self.freqs[0]))


def estimate_psd(
    frame: ComplexSampleFrame | np.ndarray,
    segment_len: int = 256,
    overlap_frac: float = 0.5,
    window: str = "hann",
) -> PsdEstimate:
    """Two-sided averaged periodogram with a Hann window by default.

    Density scaling is used, so the estimate integrates to the mean-square
    sample value.
    """
    x = frame.samples if isinstance(frame, ComplexSampleFrame) else np.asarray(frame)
    x = np.asarray(x, dtype=np.complex128)
    if segment_len < 8 or x.size < segment_len:
        raise StructuralError(
            f"need frame length >= segment_len >= 8, got {x.size} and {segment_len}"
        )
    if not 0.0 <= overlap_frac < 1.0:
        raise ValueError("overlap_frac must be in [0, 1)")
    noverlap = int(round(overlap_frac * segment_len))
    f, p = signal.welch(
        x,
        fs=1.0,
        window=window,
        nperseg=segment_len,
        noverlap=noverlap,
        detrend=False,
        return_onesided=False,
        scaling="density",
    )
    f = np.fft.fftshift(f)
    p = np.fft.fftshift(p)
    with np.errstate(divide="ignore"):
        psd_db = 10.0 * np.log10(p)
    params = {"segment_len": segment_len, "overlap": noverlap, "window": window}
    return PsdEstimate(f, psd_db, params)


def spectral_flatness(psd: PsdEstimate) -> float:
    """Geometric over arithmetic mean of the linear PSD bins."""
    p = psd.psd_linear
    if not np.all(p > 0):
        raise DomainError("spectral flatness needs strictly positive PSD bins")
    return float(np.exp(np.mean(np.log(p))) / np.mean(p))


def write_psd_csv(path, psd: PsdEstimate, comment: str = "") -> None:
    with open(path, "w") as fh:
        params = " ".join(f"{k}={v}" for k, v in psd.params.items())
        fh.write(f"# {params}{' ' + comment if comment else ''}\n")
        fh.write("freq_normalized,psd_db\n")
        for f, p in zip(psd.freqs, psd.psd_db):
            fh.write(f"{f:.8f},{p:.6f}\n")
