"""Command-line entry point: ``softook sweep | psd | selftest``.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from softook import convcode, manchester, sim, spectral
from softook.config import ConfigError, RunManifest, parse_config
from softook.core import RngStream, split_stream
from softook.demod import LlrMethod
from softook.interleave import InterleaverSpec, interleave
from softook.manchester import PhaseMode

log = logging.getLogger("softook")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

# stream id reserved for the PSD frame, away from the sweep's stream 0
_PSD_STREAM = 0x505344


class OutputExists(RuntimeError):
    pass


def _variant(cfg: sim.SimConfig, label: str) -> sim.SimConfig:
    if label == "uncoded":
        return replace(cfg, coding_enabled=False, llr_method=LlrMethod.EXACT)
    return replace(cfg, llr_method=LlrMethod(label))


def _check_writable(paths, force: bool) -> None:
    existing = [str(p) for p in paths if p.exists()]
    if existing and not force:
        raise OutputExists(f"refusing to overwrite {', '.join(existing)} (use --force)")


def cmd_sweep(manifest: RunManifest, compare=None, workers: int = 1, force: bool = False) -> int:
    cfg = manifest.config
    if compare:
        labels = list(compare)
    else:
        labels = ["uncoded" if not cfg.coding_enabled else cfg.llr_method.value]
    variants = {label: (cfg if not compare else _variant(cfg, label)) for label in labels}
    out = manifest.out_dir
    out.mkdir(parents=True, exist_ok=True)
    paths = {label: out / f"sweep_{label}.csv" for label in labels}
    _check_writable(
        [p for label in labels for p in (paths[label], paths[label].with_suffix(".json"))], force
    )
    for label, variant in variants.items():
        sim.write_metadata(
            paths[label].with_suffix(".json"),
            variant,
            label=label,
            config_hash=manifest.config_hash,
            created=manifest.created,
            workers=workers,
        )
        with open(paths[label], "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=sim.CSV_COLUMNS)
            writer.writeheader()
            fh.flush()
            for point in sim.iter_sweep(variant, workers=workers):
                writer.writerow(point.row())
                fh.flush()
                log.info(
                    "%s snr=%.2f dB trials=%d ber=%.3e bler=%.3e (%.1fs)",
                    label, point.snr_db, point.trials, point.ber, point.bler, point.wall_time_s,
                )
        print(f"wrote {paths[label]}")
    return EXIT_OK


def psd_frames(manifest: RunManifest, modes) -> dict:
    """One coded OOK frame per phase mode, all built from the same chips."""
    cfg = manifest.config
    root = split_stream(RngStream(cfg.seed, 0), _PSD_STREAM)
    info = split_stream(root, 0).generator().integers(0, 2, cfg.info_length, dtype=np.uint8)
    bits = convcode.encode(info, cfg.code) if cfg.coding_enabled else info
    if cfg.interleaver_block_size:
        bits = interleave(bits, InterleaverSpec(cfg.interleaver_block_size, bits.size))
    chips = manchester.manchester_encode(bits)
    return {
        mode: manchester.synthesize(
            chips,
            manchester.WaveformConfig(cfg.samples_per_half_bit, mode),
            split_stream(root, 1),
        )
        for mode in modes
    }


def cmd_psd(manifest: RunManifest, phase: str = "both", force: bool = False) -> int:
    modes = [PhaseMode.UNIFORM, PhaseMode.NONE] if phase == "both" else [PhaseMode(phase)]
    out = manifest.out_dir
    out.mkdir(parents=True, exist_ok=True)
    paths = {m: out / f"psd_{m.value}.csv" for m in modes}
    _check_writable(paths.values(), force)
    flatness = {}
    for mode, frame in psd_frames(manifest, modes).items():
        est = spectral.estimate_psd(frame, manifest.psd_segment_len, manifest.psd_overlap)
        flatness[mode] = spectral.spectral_flatness(est)
        spectral.write_psd_csv(
            paths[mode],
            est,
            f"phase={mode.value} flatness={flatness[mode]:.6f} config_hash={manifest.config_hash}",
        )
        print(f"wrote {paths[mode]}")
    summary = " ".join(f"flatness_{m.value}={v:.6f}" for m, v in flatness.items())
    if len(flatness) == 2:
        verdict = flatness[PhaseMode.UNIFORM] > flatness[PhaseMode.NONE]
        summary += f" uniform_flatter={str(verdict).lower()}"
    print(summary)
    return EXIT_OK


def _split_overrides(extra: list[str]) -> list[str]:
    """Accept ``key=value``, ``--key=value`` and ``--key value`` forms."""
    out, i = [], 0
    while i < len(extra):
        item = extra[i]
        if item.startswith("--") and "=" not in item:
            if i + 1 >= len(extra):
                raise ConfigError(item[2:], "command line", "missing value")
            out.append(f"{item[2:]}={extra[i + 1]}")
            i += 2
            continue
        out.append(item[2:] if item.startswith("--") else item)
        i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="softook", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, help="YAML config file")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", type=Path, default=Path("results"))
        p.add_argument("--force", action="store_true", help="overwrite existing outputs")

    p = sub.add_parser("sweep", help="BER/BLER sweep over the SNR grid")
    common(p)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument(
        "--compare",
        help="comma-separated curves: exact, approx_csi, approx_scale_free, hard, uncoded",
    )

    p = sub.add_parser("psd", help="PSD of a coded OOK frame with and without random phase")
    common(p)
    p.add_argument("--phase", choices=["both", "uniform", "none"], default="both")

    p = sub.add_parser("selftest", help="fast property checks")
    p.add_argument("--workers", type=int, default=8)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    if args.command == "selftest":
        if extra:
            parser.error(f"unrecognized arguments: {' '.join(extra)}")
        from softook.selftest import run_selftest

        return EXIT_OK if run_selftest(workers=args.workers) else EXIT_RUNTIME

    try:
        overrides = _split_overrides(extra)
        if args.seed is not None:
            overrides.append(f"seed={args.seed}")
        manifest = parse_config(args.config, overrides, out_dir=args.out)
        compare = None
        if args.command == "sweep" and args.compare:
            compare = [c.strip() for c in args.compare.split(",") if c.strip()]
            for c in compare:
                if c != "uncoded" and c not in {m.value for m in LlrMethod}:
                    raise ConfigError("--compare", "command line", f"unknown curve {c!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "sweep":
            return cmd_sweep(manifest, compare, workers=args.workers, force=args.force)
        return cmd_psd(manifest, phase=args.phase, force=args.force)
    except Exception as exc:  # noqa: BLE001 - mapped to the runtime exit code
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
