"""Fast property checks behind ``softook selftest``.

Each check returns ``(ok, detail)``; :func:`run_selftest` prints one
PASS/FAIL line per check and the total time.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import replace

import numpy as np

from softook import channel as ch
from softook import convcode, demod, interleave, manchester, sim
from softook.core import ChannelRealization, ComplexSampleFrame, RngStream


def all_codewords(n_info: int, code: convcode.ConvCode = convcode.DEFAULT_CODE):
    """Every information word of length ``n_info`` (lexicographic order) and its codeword."""
    infos = np.array(list(itertools.product((0, 1), repeat=n_info)), dtype=np.uint8)
    infos = infos.reshape(-1, n_info)
    # linearity: codeword = XOR of the codewords of the set unit vectors
    basis = np.array([convcode.encode(np.eye(n_info, dtype=np.uint8)[i], code) for i in range(n_info)])
    basis = basis.reshape(n_info, code.coded_length(n_info))
    words = (infos.astype(np.int64) @ basis) & 1
    return infos, words.astype(np.uint8)


def brute_force_ml(llrs, n_info: int, code: convcode.ConvCode = convcode.DEFAULT_CODE):
    """Exhaustive ``argmax sum((2c - 1) * llr)``; ties go to the first (smallest) info word."""
    infos, words = all_codewords(n_info, code)
    metrics = (2.0 * words - 1.0) @ np.asarray(llrs, dtype=np.float64)
    best = int(np.argmax(metrics))
    return infos[best], float(metrics[best])


def check_log_i0(points: int = 10_000):
    x = np.linspace(0.0, 700.0, points)
    err = np.abs(demod.log_bessel_i0(x) - demod.log_bessel_i0_oracle(x)) / np.maximum(1.0, x)
    return bool(err.max() <= 1e-9), f"max scaled error {err.max():.2e} on {points} points"


def check_viterbi_ml(instances: int = 200, seed: int = 7):
    gen = RngStream(seed, 1).generator()
    worst = 0.0
    for i in range(instances):
        n_info = 1 + i % 12
        llrs = gen.normal(0.0, 2.0, convcode.DEFAULT_CODE.coded_length(n_info))
        path = convcode.viterbi_decode(llrs)
        _, best = brute_force_ml(llrs, n_info)
        worst = max(worst, abs(path.metric - best))
        if abs(path.metric - best) > 1e-9 * max(1.0, abs(best)):
            return False, f"instance {i}: viterbi {path.metric} vs exhaustive {best}"
    return True, f"{instances} instances, max |metric gap| {worst:.1e}"


def check_roundtrips(seed: int = 11):
    gen = RngStream(seed, 2).generator()
    for n in (0, 1, 7, 1000, 10_000):
        bits = gen.integers(0, 2, n, dtype=np.uint8)
        if not np.array_equal(manchester.manchester_decode_hard(manchester.manchester_encode(bits)), bits):
            return False, f"manchester roundtrip failed at n={n}"
    for n, s in [(2006, 1), (2006, 2), (2006, 17), (2006, 118), (2006, 2006), (1001, 13), (5, 3)]:
        spec = interleave.InterleaverSpec(s, n)
        x = gen.normal(size=n)
        if not np.array_equal(interleave.deinterleave(interleave.interleave(x, spec), spec), x):
            return False, f"interleaver roundtrip failed at N={n}, S={s}"
    return True, "manchester and interleaver identities hold"


def check_llr_symmetry(seed: int = 13):
    gen = RngStream(seed, 3).generator()
    T, periods = 3, 500
    mags = np.abs(gen.normal(size=2 * T * periods)) * 2.0
    env = demod.EnvelopeFrame(mags, T)
    grid = mags.reshape(periods, 2 * T)
    swapped = demod.EnvelopeFrame(np.concatenate([grid[:, T:], grid[:, :T]], axis=1).ravel(), T)
    real = ChannelRealization(gen.rayleigh(0.7, periods) + 0j, 0.3)
    for name, fn in [
        ("exact", lambda e: demod.llr_exact(e, real)),
        ("approx_csi", lambda e: demod.llr_approx_csi(e, real)),
        ("approx_scale_free", demod.llr_approx_scale_free),
    ]:
        if np.max(np.abs(fn(swapped) + fn(env))) > 1e-12 * max(1.0, np.max(np.abs(fn(env)))):
            return False, f"{name} is not antisymmetric"
    scaled = demod.EnvelopeFrame(mags * 7.0, T)
    base = demod.llr_approx_scale_free(env)
    if not np.allclose(demod.llr_approx_scale_free(scaled), 7.0 * base, rtol=1e-12, atol=1e-12):
        return False, "scale-free LLR is not scale-equivariant"
    llrs = np.zeros(convcode.DEFAULT_CODE.coded_length(40))
    llrs[:] = gen.normal(size=llrs.size)
    if not np.array_equal(
        convcode.viterbi_decode(llrs).decoded_bits, convcode.viterbi_decode(3.7 * llrs).decoded_bits
    ):
        return False, "Viterbi decision changes under LLR scaling"
    return True, "antisymmetry, scale-equivariance and decision invariance hold"


def check_channel_calibration(seed: int = 17):
    tx = ComplexSampleFrame(np.zeros(1_000_000, dtype=np.complex128), 1)
    rx, _ = ch.apply(tx, ch.ChannelConfig("awgn", 0.37), RngStream(seed, 4))
    noise_ratio = float(np.mean(np.abs(rx.samples) ** 2) / 0.37)
    cfg = ch.ChannelConfig("block_rayleigh", 1.0, 1, "periods")
    gains = ch.draw_gains(100_000, 1, cfg, RngStream(seed, 5))
    fade = float(np.mean(np.abs(gains) ** 2))
    ok = abs(noise_ratio - 1.0) <= 0.01 and abs(fade - 1.0) <= 0.02
    return ok, f"E|n|^2/s2 = {noise_ratio:.4f}, E|h|^2 = {fade:.4f}"


def check_noiseless_chain():
    base = sim.SimConfig(info_length=200, snr_grid_db=(300.0,))
    failures = []
    variants = []
    for method in demod.LlrMethod:
        variants.append(replace(base, llr_method=method))
        variants.append(replace(base, llr_method=method, coding_enabled=False))
        variants.append(
            replace(base, llr_method=method, channel="block_rayleigh", interleaver_block_size=17)
        )
    for cfg in variants:
        for trial in range(3):
            errs, _ = sim.run_trial(cfg, 300.0, RngStream(5, trial))
            if errs:
                failures.append(f"{cfg.llr_method.value}/{cfg.channel.value}/coded={cfg.coding_enabled}")
    if failures:
        return False, "errors in noiseless chain: " + ", ".join(sorted(set(failures)))
    return True, f"{len(variants)} chain variants decode without errors"


def check_scheduling(workers: int = 8):
    cfg = sim.SimConfig(
        info_length=100,
        snr_grid_db=(2.0, 4.0),
        stop=sim.StopRule(min_bit_errors=30, max_trials=200),
        chunk_trials=3,
        llr_method="approx_scale_free",
    )
    strip = lambda rs: [replace(r, wall_time_s=0.0) for r in rs]  # noqa: E731
    one = strip(sim.run_sweep(cfg, workers=1))
    many = strip(sim.run_sweep(cfg, workers=workers))
    rechunked = strip(sim.run_sweep(replace(cfg, chunk_trials=16), workers=1))
    ok = one == many == rechunked
    return ok, f"1 vs {workers} workers vs rechunked: {'identical' if ok else 'DIFFERENT'}"


CHECKS = [
    ("log-I0 kernel vs quadrature oracle", check_log_i0),
    ("Viterbi equals exhaustive ML", check_viterbi_ml),
    ("Manchester / interleaver roundtrips", check_roundtrips),
    ("LLR antisymmetry and scale behaviour", check_llr_symmetry),
    ("channel calibration", check_channel_calibration),
    ("noiseless end-to-end chain", check_noiseless_chain),
    ("scheduling invariance", check_scheduling),
]


def run_selftest(workers: int = 8, echo=print) -> bool:
    t0 = time.perf_counter()
    all_ok = True
    for name, fn in CHECKS:
        ok, detail = fn(workers) if fn is check_scheduling else fn()
        all_ok &= ok
        echo(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    elapsed = time.perf_counter() - t0
    echo(f"{'PASS' if all_ok else 'FAIL'}  selftest finished in {elapsed:.1f}s")
    return all_ok
