import numpy as np
import pytest

from softook import convcode, manchester
from softook.core import ComplexSampleFrame, DomainError, RngStream, StructuralError
from softook.spectral import PsdEstimate, estimate_psd, spectral_flatness, write_psd_csv


def test_dc_tone_dominates():
    est = estimate_psd(np.ones(4096))
    k = int(np.argmax(est.psd_db))
    assert est.freqs[k] == 0.0
    finite = est.psd_db[np.isfinite(est.psd_db)]
    median = np.median(est.psd_db) if np.all(np.isfinite(est.psd_db)) else -np.inf
    assert est.psd_db[k] >= median + 30
    assert finite.size >= 1


@pytest.mark.parametrize("k", [-100, -7, 3, 64])
def test_tone_localization(k):
    n = np.arange(8192)
    est = estimate_psd(np.exp(2j * np.pi * k / 256 * n), segment_len=256)
    assert est.freqs[int(np.argmax(est.psd_db))] == pytest.approx(k / 256)


def test_bins_uniform_and_two_sided():
    est = estimate_psd(np.random.default_rng(0).normal(size=2048), segment_len=128)
    assert est.freqs.size == est.psd_db.size == 128
    assert np.allclose(np.diff(est.freqs), 1 / 128)
    assert est.freqs[0] == -0.5
    assert est.params == {"segment_len": 128, "overlap": 64, "window": "hann"}


def test_power_consistency_white_noise():
    gen = np.random.default_rng(1)
    x = (gen.normal(size=200_000) + 1j * gen.normal(size=200_000)) * np.sqrt(0.35)
    est = estimate_psd(x)
    assert est.total_power() == pytest.approx(np.mean(np.abs(x) ** 2), rel=0.03)


def test_power_consistency_ook_frame():
    chips = manchester.manchester_encode(np.random.default_rng(2).integers(0, 2, 50_000))
    frame = manchester.synthesize(chips, manchester.WaveformConfig(2, "uniform"), RngStream(2))
    est = estimate_psd(frame)
    assert est.total_power() == pytest.approx(np.mean(np.abs(frame.samples) ** 2), rel=0.03)


def test_flatness_bounds():
    flat = PsdEstimate(np.linspace(-0.5, 0.5, 64, endpoint=False), np.zeros(64), {})
    assert spectral_flatness(flat) == pytest.approx(1.0)
    spike = np.full(64, -300.0)
    spike[5] = 0.0
    assert spectral_flatness(PsdEstimate(flat.freqs, spike, {})) < 1e-20
    with pytest.raises(DomainError):
        spectral_flatness(PsdEstimate(flat.freqs, np.full(64, -np.inf), {}))


def test_white_noise_is_flat():
    gen = np.random.default_rng(3)
    x = gen.normal(size=1_000_000) + 1j * gen.normal(size=1_000_000)
    assert spectral_flatness(estimate_psd(x)) >= 0.9


@pytest.mark.parametrize("seed", range(3))
def test_random_phase_flatter_than_plain_ook(seed):
    gen = np.random.default_rng(seed)
    chips = manchester.manchester_encode(convcode.encode(gen.integers(0, 2, 50_000)))
    flat = {}
    for mode in ("uniform", "none"):
        frame = manchester.synthesize(chips, manchester.WaveformConfig(2, mode), RngStream(seed))
        assert frame.samples.size >= 200_000
        flat[mode] = spectral_flatness(estimate_psd(frame))
    assert flat["uniform"] > flat["none"]


def test_errors():
    with pytest.raises(StructuralError):
        estimate_psd(np.ones(100), segment_len=256)
    with pytest.raises(StructuralError):
        estimate_psd(np.ones(100), segment_len=4)
    with pytest.raises(ValueError):
        estimate_psd(np.ones(1000), overlap_frac=1.0)


def test_csv_output(tmp_path):
    est = estimate_psd(ComplexSampleFrame(np.ones(512), 1), segment_len=64)
    path = tmp_path / "psd.csv"
    write_psd_csv(path, est, "phase=none")
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# segment_len=64 overlap=32 window=hann phase=none")
    assert lines[1] == "freq_normalized,psd_db"
    assert len(lines) == 2 + 64
