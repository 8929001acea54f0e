"""Monte-Carlo link simulation: trial chain, SNR sweeps and dB gaps."""

from __future__ import annotations

import csv
import json
import math
import multiprocessing as mp
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Iterator, Sequence

import numpy as np

from softook import channel as ch
from softook import convcode, demod, manchester
from softook._backend import BACKEND
from softook.core import RNG_ALGORITHM, RangeError, RngStream, snr_db_to_noise_power, split_stream
from softook.demod import LlrMethod
from softook.interleave import InterleaverSpec, deinterleave, interleave
from softook.manchester import PhaseMode

CSV_COLUMNS = (
    "snr_db",
    "trials",
    "info_bits",
    "bit_errors",
    "ber",
    "ber_ci95",
    "block_errors",
    "bler",
    "wall_time_s",
)


@dataclass(frozen=True)
class StopRule:
    """A point ends at the first trial where any limit is reached.

    ``min_bit_errors`` and ``min_block_errors`` must both be met to count as
    the error target.
    """

    max_trials: int = 100_000
    min_bit_errors: int = 200
    max_bits: int = 10**9
    min_block_errors: int = 0

    def __post_init__(self):
        if self.min_bit_errors < 1:
            raise ValueError("min_bit_errors must be >= 1")
        if self.max_trials < 1 or self.max_bits < 1:
            raise ValueError("max_trials and max_bits must be >= 1")
        if self.min_block_errors < 0:
            raise ValueError("min_block_errors must be >= 0")


@dataclass(frozen=True)
class SimConfig:
    info_length: int = 1000
    samples_per_half_bit: int = 2
    generators: tuple[int, int] = (0o15, 0o13)
    channel: ch.ChannelKind = ch.ChannelKind.AWGN
    fading_block_length: int = 1003
    fading_block_unit: ch.BlockUnit = ch.BlockUnit.SAMPLES
    llr_method: LlrMethod = LlrMethod.EXACT
    interleaver_block_size: int = 0
    coding_enabled: bool = True
    phase_mode: PhaseMode = PhaseMode.UNIFORM
    snr_grid_db: tuple[float, ...] = (0.0,)
    stop: StopRule = field(default_factory=StopRule)
    seed: int = 1
    chunk_trials: int = 8

    def __post_init__(self):
        object.__setattr__(self, "channel", ch.ChannelKind(self.channel))
        object.__setattr__(self, "llr_method", LlrMethod(self.llr_method))
        object.__setattr__(self, "phase_mode", PhaseMode(self.phase_mode))
        object.__setattr__(self, "fading_block_unit", ch.BlockUnit(self.fading_block_unit))
        object.__setattr__(self, "generators", tuple(int(g) for g in self.generators))
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))
        if self.info_length < 1:
            raise ValueError("info_length must be >= 1")
        if self.samples_per_half_bit < 1:
            raise ValueError("samples_per_half_bit must be >= 1")
        if not self.snr_grid_db:
            raise ValueError("snr_grid_db must not be empty")
        if self.interleaver_block_size < 0:
            raise ValueError("interleaver_block_size must be >= 0 (0 disables)")
        if self.fading_block_length < 1:
            raise ValueError("fading_block_length must be >= 1")
        if self.chunk_trials < 1:
            raise ValueError("chunk_trials must be >= 1")

    @property
    def code(self) -> convcode.ConvCode:
        return convcode.ConvCode(self.generators)

    @property
    def frame_bits(self) -> int:
        """Number of bits that go through the Manchester mapper per trial."""
        if self.coding_enabled:
            return self.code.coded_length(self.info_length)
        return self.info_length

    def to_dict(self) -> dict:
        d = asdict(self)
        d["generators"] = ",".join(f"{g:o}" for g in self.generators)
        for key in ("channel", "llr_method", "phase_mode", "fading_block_unit"):
            d[key] = getattr(self, key).value
        d["snr_grid_db"] = list(self.snr_grid_db)
        return d


@dataclass(frozen=True)
class SimPointResult:
    snr_db: float
    trials: int
    info_bits: int
    bit_errors: int
    block_errors: int
    wall_time_s: float = 0.0

    @property
    def ber(self) -> float:
        return self.bit_errors / self.info_bits if self.info_bits else 0.0

    @property
    def bler(self) -> float:
        return self.block_errors / self.trials if self.trials else 0.0

    @property
    def ber_ci95(self) -> float:
        if not self.info_bits:
            return 0.0
        p = self.ber
        return 1.96 * math.sqrt(p * (1.0 - p) / self.info_bits)

    def row(self) -> dict:
        return {
            "snr_db": f"{self.snr_db:.6g}",
            "trials": self.trials,
            "info_bits": self.info_bits,
            "bit_errors": self.bit_errors,
            "ber": f"{self.ber:.9e}",
            "ber_ci95": f"{self.ber_ci95:.9e}",
            "block_errors": self.block_errors,
            "bler": f"{self.bler:.9e}",
            "wall_time_s": f"{self.wall_time_s:.3f}",
        }


class _Chain:
    """Per-config objects that are reused across trials."""

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        self.code = cfg.code
        self.waveform = manchester.WaveformConfig(cfg.samples_per_half_bit, cfg.phase_mode)
        n = cfg.frame_bits
        if cfg.interleaver_block_size:
            if cfg.interleaver_block_size > n:
                raise ValueError(
                    f"interleaver_block_size {cfg.interleaver_block_size} exceeds "
                    f"frame length {n}"
                )
            self.interleaver = InterleaverSpec(cfg.interleaver_block_size, n)
        else:
            self.interleaver = None

    def run(self, snr_db: float, rng: RngStream) -> tuple[int, int]:
        cfg = self.cfg
        info = split_stream(rng, 0).generator().integers(0, 2, cfg.info_length, dtype=np.uint8)
        bits = convcode.encode(info, self.code) if cfg.coding_enabled else info
        if self.interleaver is not None:
            bits = interleave(bits, self.interleaver)
        tx = manchester.synthesize(
            manchester.manchester_encode(bits), self.waveform, split_stream(rng, 1)
        )
        chan_cfg = ch.ChannelConfig(
            cfg.channel,
            snr_db_to_noise_power(snr_db),
            cfg.fading_block_length,
            cfg.fading_block_unit,
        )
        rx, realization = ch.apply(tx, chan_cfg, split_stream(rng, 2))
        llrs = demod.compute_llrs(cfg.llr_method, demod.envelope(rx), realization)
        if self.interleaver is not None:
            llrs = deinterleave(llrs, self.interleaver)
        if not cfg.coding_enabled:
            decoded = (llrs >= 0).astype(np.uint8)
        elif cfg.llr_method is LlrMethod.HARD:
            decoded = convcode.hard_decode(llrs, self.code).decoded_bits
        else:
            decoded = convcode.viterbi_decode(llrs, self.code).decoded_bits
        errors = int(np.count_nonzero(decoded != info))
        return errors, int(errors > 0)


def point_stream(cfg: SimConfig, snr_db: float) -> RngStream:
    """Root stream of one SNR point.

    Keyed by the SNR value, not its grid index, so curves for different
    methods share info bits and noise at equal SNR.
    """
    return split_stream(RngStream(cfg.seed, 0), int(round(snr_db * 1e6)))


def trial_stream(cfg: SimConfig, snr_db: float, trial: int) -> RngStream:
    return split_stream(point_stream(cfg, snr_db), trial)


def run_trial(cfg: SimConfig, snr_db: float, trial_rng: RngStream) -> tuple[int, int]:
    """Simulate one frame; returns ``(bit_errors, block_error)``."""
    return _Chain(cfg).run(snr_db, trial_rng)


def _run_chunk(cfg: SimConfig, snr_db: float, start: int, count: int) -> np.ndarray:
    chain = _Chain(cfg)
    out = np.empty((count, 2), dtype=np.int64)
    for j in range(count):
        out[j] = chain.run(snr_db, trial_stream(cfg, snr_db, start + j))
    return out


def _accumulate(results: np.ndarray, totals: list[int], cfg: SimConfig) -> int | None:
    """Fold trial results into ``totals`` in order.

    Returns the number of trials consumed from ``results`` if the stop rule
    fired inside it, else ``None``.
    """
    stop = cfg.stop
    for j, (errs, blk) in enumerate(results):
        totals[0] += 1
        totals[1] += int(errs)
        totals[2] += int(blk)
        trials, bit_errors, block_errors = totals
        if (
            trials >= stop.max_trials
            or trials * cfg.info_length >= stop.max_bits
            or (bit_errors >= stop.min_bit_errors and block_errors >= stop.min_block_errors)
        ):
            return j + 1
    return None


def _simulate_point(cfg: SimConfig, snr_db: float, pool) -> SimPointResult:
    t0 = time.perf_counter()
    totals = [0, 0, 0]
    chunk = cfg.chunk_trials
    next_start = 0
    if pool is None:
        while True:
            res = _run_chunk(cfg, snr_db, next_start, chunk)
            next_start += chunk
            if _accumulate(res, totals, cfg) is not None:
                break
    else:
        depth = 2 * pool._max_workers
        pending: deque = deque()
        try:
            while True:
                while len(pending) < depth:
                    pending.append(pool.submit(_run_chunk, cfg, snr_db, next_start, chunk))
                    next_start += chunk
                if _accumulate(pending.popleft().result(), totals, cfg) is not None:
                    break
        finally:
            for fut in pending:
                fut.cancel()
    trials, bit_errors, block_errors = totals
    return SimPointResult(
        snr_db=snr_db,
        trials=trials,
        info_bits=trials * cfg.info_length,
        bit_errors=bit_errors,
        block_errors=block_errors,
        wall_time_s=time.perf_counter() - t0,
    )


def iter_sweep(cfg: SimConfig, workers: int = 1) -> Iterator[SimPointResult]:
    """Yield one result per SNR grid point, in grid order.

    Results depend only on ``cfg``: trials are folded strictly in trial
    order and any speculative work past the stopping trial is discarded.
    """
    _Chain(cfg)  # fail fast on inconsistent configs
    if workers <= 1:
        for snr in cfg.snr_grid_db:
            yield _simulate_point(cfg, snr, None)
        return
    with ProcessPoolExecutor(max_workers=workers, mp_context=mp.get_context("fork")) as pool:
        for snr in cfg.snr_grid_db:
            yield _simulate_point(cfg, snr, pool)


def run_sweep(cfg: SimConfig, workers: int = 1) -> list[SimPointResult]:
    return list(iter_sweep(cfg, workers))


def crossing_snr(curve: Sequence[SimPointResult], level: float, metric: str = "ber") -> float:
    """SNR where ``curve`` first falls through ``level`` (log-linear interpolation)."""
    pts = sorted(curve, key=lambda r: r.snr_db)
    snrs = [p.snr_db for p in pts]
    vals = [getattr(p, metric) for p in pts]
    for k in range(len(pts)):
        if vals[k] == level:
            return snrs[k]
        if k + 1 < len(pts) and vals[k] > level > vals[k + 1]:
            if vals[k + 1] <= 0:
                # zero-error point: cannot interpolate in log space
                break
            y0, y1 = math.log10(vals[k]), math.log10(vals[k + 1])
            frac = (math.log10(level) - y0) / (y1 - y0)
            return snrs[k] + frac * (snrs[k + 1] - snrs[k])
    raise RangeError(f"{metric} level {level:g} is not bracketed by the curve")


def db_gap_at_level(
    curve_a: Sequence[SimPointResult],
    curve_b: Sequence[SimPointResult],
    level: float,
    metric: str = "ber",
) -> float:
    """SNR of ``curve_b`` minus SNR of ``curve_a`` where each crosses ``level``.

    Interpolation is linear in (SNR dB, log10 metric) between the first pair
    of neighbouring points that straddle the level.
    """
    if metric not in ("ber", "bler"):
        raise ValueError("metric must be 'ber' or 'bler'")
    if not level > 0:
        raise RangeError("level must be > 0")
    return crossing_snr(curve_b, level, metric) - crossing_snr(curve_a, level, metric)


def write_csv(path, results: Sequence[SimPointResult]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for r in results:
            writer.writerow(r.row())


def read_csv(path) -> list[SimPointResult]:
    with open(path, newline="") as fh:
        return [
            SimPointResult(
                snr_db=float(row["snr_db"]),
                trials=int(row["trials"]),
                info_bits=int(row["info_bits"]),
                bit_errors=int(row["bit_errors"]),
                block_errors=int(row["block_errors"]),
                wall_time_s=float(row["wall_time_s"]),
            )
            for row in csv.DictReader(fh)
        ]


def metadata(cfg: SimConfig, **extra) -> dict:
    from softook import __version__

    return {
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "rng_algorithm": RNG_ALGORITHM,
        "build_version": f"softook {__version__} ({BACKEND} kernels)",
        "csv_columns": list(CSV_COLUMNS),
        **extra,
    }


def write_metadata(path, cfg: SimConfig, **extra) -> None:
    with open(path, "w") as fh:
        json.dump(metadata(cfg, **extra), fh, indent=2, sort_keys=True)
        fh.write("\n")


def config_from_dict(d: dict) -> SimConfig:
    """Inverse of :meth:`SimConfig.to_dict`."""
    d = dict(d)
    if isinstance(d.get("generators"), str):
        d["generators"] = convcode.parse_generators(d["generators"])
    if isinstance(d.get("stop"), dict):
        d["stop"] = StopRule(**d["stop"])
    names = {f.name for f in fields(SimConfig)}
    unknown = set(d) - names
    if unknown:
        raise KeyError(f"unknown SimConfig keys: {sorted(unknown)}")
    return SimConfig(**d)

