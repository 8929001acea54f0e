import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from softook.core import ChannelRealization, ComplexSampleFrame, DomainError, StructuralError
from softook.demod import (
    EnvelopeFrame,
    LlrMethod,
    compute_llrs,
    envelope,
    llr_approx_csi,
    llr_approx_scale_free,
    llr_exact,
    llr_hard,
    log_bessel_i0,
    log_bessel_i0_oracle,
)

# ln I0(x) from a 30-digit mpmath evaluation, frozen
REFERENCE = {
    1.0: 0.2359143585071786487,
    2.0: 0.8239935414829562829,
    4.0: 2.4249727955154593099,
    50.0: 47.127575501871804584,
    700.0: 695.80569999844344908,
}


def _series_log_i0(x):
    """sum (x/2)^(2k) / (k!)^2, an oracle independent of the quadrature."""
    return math.log(sum((x / 2) ** (2 * k) / math.factorial(k) ** 2 for k in range(80)))


def _real(gains, s2=1.0):
    return ChannelRealization(np.asarray(gains, dtype=complex), s2)


def test_envelope_examples():
    rx = ComplexSampleFrame(np.array([3 + 4j, 0, np.exp(1.234j), 1]), 1)
    env = envelope(rx)
    assert env.magnitudes[0] == 5.0
    assert env.magnitudes[1] == 0.0
    assert env.magnitudes[2] == pytest.approx(1.0, abs=1e-12)
    assert env.periods == 2


def test_envelope_frame_validation():
    with pytest.raises(StructuralError):
        EnvelopeFrame(np.ones(3), 1)
    with pytest.raises(DomainError):
        EnvelopeFrame(np.array([-1.0, 0.0]), 1)


def test_log_i0_examples(backend):
    assert log_bessel_i0(0.0) == 0.0
    assert log_bessel_i0(1.0) == pytest.approx(0.235914, abs=1e-5)
    assert log_bessel_i0(50.0) == pytest.approx(47.12754, abs=1e-4)


@pytest.mark.parametrize("x", sorted(REFERENCE))
def test_log_i0_matches_reference(backend, x):
    assert log_bessel_i0(x) == pytest.approx(REFERENCE[x], rel=1e-13)
    assert log_bessel_i0_oracle(x) == pytest.approx(REFERENCE[x], rel=1e-13)


def test_oracle_examples():
    assert log_bessel_i0_oracle(0.0) == 0.0
    assert log_bessel_i0_oracle(2.0) == pytest.approx(0.8239935414829563, abs=1e-9)
    assert log_bessel_i0_oracle(4.0) == pytest.approx(2.425011, abs=1e-4)
    assert math.log(11.30192) == pytest.approx(log_bessel_i0_oracle(4.0), abs=1e-5)


@pytest.mark.parametrize("x", [0.0, 0.3, 2.0, 4.0, 9.5, 16.9, 17.1, 30.0, 60.0])
def test_oracle_agrees_with_power_series(x):
    assert log_bessel_i0_oracle(x) == pytest.approx(_series_log_i0(x), rel=1e-12, abs=1e-15)


def test_kernel_accuracy_grid(backend):
    x = np.linspace(0.0, 700.0, 10_000)
    err = np.abs(log_bessel_i0(x) - log_bessel_i0_oracle(x))
    assert np.all(err <= 1e-9 * np.maximum(1.0, x))


def test_crossover_neighbourhood(backend):
    x = np.linspace(16.0, 18.0, 2001)
    assert np.max(np.abs(log_bessel_i0(x) - log_bessel_i0_oracle(x))) < 1e-12


def test_no_overflow_for_huge_arguments(backend):
    x = np.array([1e3, 1e5, 1e8])
    out = log_bessel_i0(x)
    assert np.all(np.isfinite(out))
    assert out == pytest.approx(x - 0.5 * np.log(2 * np.pi * x) + np.log1p(1 / (8 * x)), rel=1e-9)


def test_domain_errors():
    for bad in (-1e-12, float("nan"), float("inf")):
        with pytest.raises(DomainError):
            log_bessel_i0(bad)
    with pytest.raises(DomainError):
        log_bessel_i0_oracle(700.5)
    with pytest.raises(DomainError):
        log_bessel_i0_oracle(-1.0)


def test_large_argument_bound():
    # x + log(sqrt(2 pi)/4) - log(x)/2 bounds log I0 from above; the gap
    # tends to log(pi/2) from below, so the relative gap is <= 2% once x >= 23.
    x = np.linspace(0.5, 700, 5000)
    bound = x + np.log(np.sqrt(2 * np.pi) / 4) - 0.5 * np.log(x)
    gap = bound - log_bessel_i0(x)
    assert np.all(gap > 0)
    assert np.all(gap[x >= 10] <= math.log(math.pi / 2))
    assert np.all((gap / x)[x >= 23] <= 0.02)


def test_exact_llr_examples(backend):
    env = EnvelopeFrame(np.array([0.3, 2.5, 1.0, 1.0, 2.0, 0.0]), 1)
    assert llr_exact(env, _real([0, 0, 0]))[0] == 0.0
    out = llr_exact(env, _real([1, 1, 1]))
    assert out[1] == 0.0
    assert out[2] == pytest.approx(REFERENCE[4.0], abs=1e-12)
    assert out[2] == pytest.approx(2.425011, abs=1e-4)


def test_approx_csi_examples():
    env = EnvelopeFrame(np.array([1.0, 1.0, 0.0, 0.0]), 2)
    assert llr_approx_csi(env, _real([1])).tolist() == [4.0]
    assert llr_approx_csi(env, _real([0])).tolist() == [0.0]
    env1 = EnvelopeFrame(np.array([2.0, 0.0]), 1)
    approx, exact = llr_approx_csi(env1, _real([1]))[0], llr_exact(env1, _real([1]))[0]
    assert approx == 4.0
    assert np.sign(approx) == np.sign(exact) and approx > exact


def test_scale_free_examples():
    env = EnvelopeFrame(np.array([1.5, 1.5, 0.3, 0.9]), 2)
    assert llr_approx_scale_free(env)[0] == pytest.approx(1.8, abs=1e-15)
    assert llr_approx_scale_free(EnvelopeFrame(np.array([0.7, 0.7]), 1))[0] == 0.0
    scaled = EnvelopeFrame(7 * env.magnitudes, 2)
    assert llr_approx_scale_free(scaled)[0] == pytest.approx(7 * 1.8, rel=1e-15)


def test_hard_examples():
    assert llr_hard(EnvelopeFrame(np.array([1.0, 0.0]), 1)).tolist() == [1.0]
    assert llr_hard(EnvelopeFrame(np.array([0.0, 1.0]), 1)).tolist() == [-1.0]
    assert llr_hard(EnvelopeFrame(np.array([0.5, 0.5]), 1)).tolist() == [1.0]


def test_length_mismatch():
    env = EnvelopeFrame(np.ones(8), 2)
    with pytest.raises(StructuralError):
        llr_exact(env, _real([1, 1, 1]))
    with pytest.raises(StructuralError):
        llr_approx_csi(env, _real([1]))


def test_dispatch():
    env = EnvelopeFrame(np.array([2.0, 0.5, 0.1, 0.2]), 1)
    real = _real([0.8, 0.8], 0.4)
    assert np.array_equal(compute_llrs("exact", env, real), llr_exact(env, real))
    assert np.array_equal(compute_llrs(LlrMethod.APPROX_CSI, env, real), llr_approx_csi(env, real))
    assert np.array_equal(compute_llrs("approx_scale_free", env), llr_approx_scale_free(env))
    assert np.array_equal(compute_llrs("hard", env), llr_hard(env))


frames = st.integers(1, 4).flatmap(
    lambda T: st.tuples(
        st.just(T),
        hnp.arrays(np.float64, st.integers(1, 40).map(lambda p: 2 * T * p), elements=st.floats(0, 20)),
    )
)


@settings(deadline=None)
@given(frames, st.floats(0.05, 3.0), st.floats(0.01, 2.0))
def test_antisymmetry(frame, h, s2):
    T, mags = frame
    env = EnvelopeFrame(mags, T)
    grid = mags.reshape(-1, 2 * T)
    swapped = EnvelopeFrame(np.concatenate([grid[:, T:], grid[:, :T]], axis=1).ravel(), T)
    real = _real(np.full(env.periods, h), s2)
    for fn in (lambda e: llr_exact(e, real), lambda e: llr_approx_csi(e, real), llr_approx_scale_free):
        a, b = fn(env), fn(swapped)
        assert np.allclose(a, -b, rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(a))))


@settings(deadline=None)
@given(frames, st.floats(0.05, 3.0), st.floats(0.05, 2.0), st.data())
def test_exact_is_monotone_in_each_half(frame, h, s2, data):
    T, mags = frame
    env = EnvelopeFrame(mags, T)
    real = _real(np.full(env.periods, h), s2)
    base = llr_exact(env, real)
    j = data.draw(st.integers(0, mags.size - 1))
    bumped = mags.copy()
    bumped[j] += 0.5
    out = llr_exact(EnvelopeFrame(bumped, T), real)
    period, pos = divmod(j, 2 * T)
    if pos < T:
        assert out[period] > base[period]
    else:
        assert out[period] < base[period]


@settings(deadline=None)
@given(
    hnp.arrays(np.float64, st.integers(1, 50).map(lambda p: 2 * p), elements=st.floats(0, 5)),
    st.floats(0.05, 1.0),
)
def test_signs_agree_for_single_sample_halves(mags, s2):
    env = EnvelopeFrame(mags, 1)
    real = _real(np.ones(env.periods), s2)
    exact = llr_exact(env, real)
    mask = np.abs(exact) > 1e-9
    assert np.array_equal(np.sign(exact[mask]), np.sign(llr_approx_csi(env, real)[mask]))
    assert np.array_equal(np.sign(exact[mask]), np.sign(llr_approx_scale_free(env)[mask]))


def test_signs_can_disagree_with_two_sample_halves():
    # log I0 is convex: (1.01, 1.01) vs (2, 0) favours the second half exactly
    # but the first half linearly
    env = EnvelopeFrame(np.array([1.01, 1.01, 2.0, 0.0]), 2)
    real = _real([1.0], 0.2)
    assert llr_approx_scale_free(env)[0] > 0
    assert llr_exact(env, real)[0] < 0


@settings(deadline=None)
@given(frames, st.floats(0.01, 100))
def test_scale_free_sign_is_scale_invariant(frame, c):
    T, mags = frame
    a = llr_approx_scale_free(EnvelopeFrame(mags, T))
    b = llr_approx_scale_free(EnvelopeFrame(c * mags, T))
    assert np.array_equal(np.sign(a), np.sign(b))
