import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from softook.core import RngStream, StructuralError
from softook.manchester import (
    PhaseMode,
    WaveformConfig,
    manchester_decode_hard,
    manchester_encode,
    synthesize,
)


def test_mapping():
    assert manchester_encode([1]).tolist() == [1, 0]
    assert manchester_encode([0]).tolist() == [0, 1]
    assert manchester_encode([1, 0, 1]).tolist() == [1, 0, 0, 1, 1, 0]


def test_decode_examples():
    assert manchester_decode_hard([1, 0]).tolist() == [1]
    assert manchester_decode_hard([0, 1, 0, 1]).tolist() == [0, 0]
    with pytest.raises(StructuralError):
        manchester_decode_hard([1, 1])
    with pytest.raises(StructuralError):
        manchester_decode_hard([0, 1, 0, 0])
    with pytest.raises(StructuralError):
        manchester_decode_hard([0, 1, 0])


@settings(max_examples=50)
@given(hnp.arrays(np.uint8, st.integers(0, 10_000), elements=st.integers(0, 1)))
def test_decode_inverts_encode(bits):
    assert np.array_equal(manchester_decode_hard(manchester_encode(bits)), bits)


def test_synthesize_repeats_chips():
    frame = synthesize([1, 0], WaveformConfig(2, "none"), RngStream(0))
    assert np.array_equal(frame.samples, [1, 1, 0, 0])
    assert frame.periods == 1


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_random_phase_keeps_magnitudes(seed):
    frame = synthesize([1, 0], WaveformConfig(2, "uniform"), RngStream(seed))
    assert np.allclose(np.abs(frame.samples), [1, 1, 0, 0], atol=1e-15)


def test_half_on_with_t3():
    frame = synthesize([0, 1], WaveformConfig(3, "uniform"), RngStream(4))
    assert frame.samples.size == 6
    assert np.sum(np.isclose(np.abs(frame.samples), 1.0)) == 3


@settings(max_examples=40)
@given(
    hnp.arrays(np.uint8, st.integers(0, 500), elements=st.integers(0, 1)),
    st.integers(1, 5),
    st.integers(0, 2**32),
)
def test_dc_balance_and_phase_transparency(bits, T, seed):
    chips = manchester_encode(bits)
    plain = synthesize(chips, WaveformConfig(T, PhaseMode.NONE), RngStream(seed))
    rotated = synthesize(chips, WaveformConfig(T, PhaseMode.UNIFORM), RngStream(seed))
    mags = np.abs(plain.samples)
    assert np.count_nonzero(mags == 1.0) == mags.size // 2
    assert np.count_nonzero(mags == 0.0) == mags.size // 2
    assert np.allclose(np.abs(rotated.samples), mags, atol=1e-15)


def test_phase_is_deterministic_and_varies():
    chips = manchester_encode(np.ones(200, dtype=np.uint8))
    a = synthesize(chips, WaveformConfig(2), RngStream(7, 1)).samples
    b = synthesize(chips, WaveformConfig(2), RngStream(7, 1)).samples
    assert np.array_equal(a, b)
    on = a[np.abs(a) > 0.5]
    assert np.std(np.angle(on)) > 1.0


def test_bad_config():
    with pytest.raises(ValueError):
        WaveformConfig(0)
    with pytest.raises(StructuralError):
        synthesize([1, 0, 1], WaveformConfig(1), RngStream(0))
