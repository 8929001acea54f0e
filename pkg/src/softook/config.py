"""YAML run configuration with dotted-key overrides.

Resolution order: built-in defaults, then the config file, then overrides.
Every key is listed in :data:`DEFAULTS`; anything else is rejected.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from softook.convcode import ConvCode, parse_generators
from softook.sim import SimConfig, StopRule

DEFAULTS: dict = {
    "seed": 1,
    "info_length": 1000,
    "samples_per_half_bit": 2,
    "code": {"generators": "15,13"},
    "channel": {
        "kind": "awgn",
        "fading_block_length": 1003,
        "fading_block_unit": "samples",
    },
    "llr": "exact",
    "interleaver_block_size": 0,
    "coding": True,
    "phase": "uniform",
    "snr_grid_db": {"start": 0.0, "stop": 10.0, "step": 0.5},
    "stop": {
        "max_trials": 100_000,
        "min_bit_errors": 200,
        "max_bits": 10**9,
        "min_block_errors": 0,
    },
    "chunk_trials": 8,
    "psd": {"segment_len": 256, "overlap": 0.5},
}


class ConfigError(ValueError):
    def __init__(self, key: str, location: str, message: str):
        self.key = key
        self.location = location
        super().__init__(f"{location}: {key}: {message}")


@dataclass
class RunManifest:
    config: SimConfig
    psd_segment_len: int
    psd_overlap: float
    resolved: dict
    out_dir: Path = Path(".")
    created: str = field(
        default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    )

    @property
    def config_hash(self) -> str:
        return config_hash(self.resolved)


def config_hash(resolved: dict) -> str:
    blob = json.dumps(resolved, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _merge(base: dict, extra: dict, location: str, origins: dict, prefix: str = "") -> None:
    for key, value in extra.items():
        dotted = f"{prefix}{key}"
        if key not in base:
            raise ConfigError(dotted, location, "unknown key")
        if isinstance(base[key], dict) and dotted != "snr_grid_db":
            if not isinstance(value, dict):
                raise ConfigError(dotted, location, "expected a mapping")
            _merge(base[key], value, location, origins, dotted + ".")
        else:
            base[key] = value
            origins[dotted] = location


def _set_dotted(tree: dict, dotted: str, value, location: str, origins: dict) -> None:
    parts = dotted.split(".")
    node = tree
    for i, part in enumerate(parts[:-1]):
        key = ".".join(parts[: i + 1])
        if part not in node or not isinstance(node[part], dict) or key == "snr_grid_db":
            raise ConfigError(dotted, location, "unknown key")
        node = node[part]
    if parts[-1] not in node or (isinstance(node[parts[-1]], dict) and dotted != "snr_grid_db"):
        raise ConfigError(dotted, location, "unknown key")
    node[parts[-1]] = value
    origins[dotted] = location


def parse_override(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise ConfigError(text, "command line", "override must look like key=value")
    key, raw = text.split("=", 1)
    key = key.strip().lstrip("-")
    try:
        value = yaml.safe_load(raw) if raw.strip() else ""
    except yaml.YAMLError:
        value = raw
    return key, value


def _grid(value) -> tuple[float, ...]:
    if isinstance(value, dict):
        start, stop, step = (float(value[k]) for k in ("start", "stop", "step"))
        if step <= 0 or stop < start:
            raise ValueError("need step > 0 and stop >= start")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 10) for i in range(n))
    if isinstance(value, (int, float)):
        return (float(value),)
    if isinstance(value, str):
        return tuple(float(v) for v in value.split(",") if v.strip())
    return tuple(float(v) for v in value)


def _generators(value) -> tuple[int, int]:
    if isinstance(value, (list, tuple)):
        value = ",".join(str(v) for v in value)
    gens = parse_generators(value)
    ConvCode(gens)
    return gens


def _bool(value) -> bool:
    if isinstance(value, bool):
        return value
    raise ValueError("expected true or false")


def _int(value) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ValueError(f"expected an integer, got {value!r}")
    return int(value)


def resolve(tree: dict, origins: dict) -> tuple[SimConfig, int, float]:
    def where(key):
        return origins.get(key, "defaults")

    def conv(key, fn, value):
        try:
            return fn(value)
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError(key, where(key), f"invalid value {value!r} ({exc})") from None

    stop = tree["stop"]
    kwargs = dict(
        seed=conv("seed", _int, tree["seed"]),
        info_length=conv("info_length", _int, tree["info_length"]),
        samples_per_half_bit=conv("samples_per_half_bit", _int, tree["samples_per_half_bit"]),
        generators=conv("code.generators", _generators, tree["code"]["generators"]),
        channel=conv("channel.kind", str, tree["channel"]["kind"]),
        fading_block_length=conv(
            "channel.fading_block_length", _int, tree["channel"]["fading_block_length"]
        ),
        fading_block_unit=tree["channel"]["fading_block_unit"],
        llr_method=tree["llr"],
        interleaver_block_size=conv(
            "interleaver_block_size", _int, tree["interleaver_block_size"]
        ),
        coding_enabled=conv("coding", _bool, tree["coding"]),
        phase_mode=tree["phase"],
        snr_grid_db=conv("snr_grid_db", _grid, tree["snr_grid_db"]),
        chunk_trials=conv("chunk_trials", _int, tree["chunk_trials"]),
    )
    stop_kwargs = {k: conv(f"stop.{k}", _int, v) for k, v in stop.items()}
    try:
        kwargs["stop"] = StopRule(**stop_kwargs)
    except ValueError as exc:
        raise ConfigError("stop", where("stop.min_bit_errors"), str(exc)) from None
    # enum-valued keys: report the offending key by name
    for key, cfg_key in (
        ("channel.kind", "channel"),
        ("channel.fading_block_unit", "fading_block_unit"),
        ("llr", "llr_method"),
        ("phase", "phase_mode"),
    ):
        try:
            SimConfig(**{cfg_key: kwargs[cfg_key]})
        except ValueError as exc:
            raise ConfigError(key, where(key), f"invalid value {kwargs[cfg_key]!r} ({exc})") from None
    try:
        cfg = SimConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError("config", "resolved config", str(exc)) from None
    seg = conv("psd.segment_len", _int, tree["psd"]["segment_len"])
    overlap = conv("psd.overlap", float, tree["psd"]["overlap"])
    if seg < 8:
        raise ConfigError("psd.segment_len", where("psd.segment_len"), "must be >= 8")
    if not 0.0 <= overlap < 1.0:
        raise ConfigError("psd.overlap", where("psd.overlap"), "must be in [0, 1)")
    return cfg, seg, overlap


def parse_config(path=None, overrides=(), out_dir=".") -> RunManifest:
    tree = json.loads(json.dumps(DEFAULTS))
    origins: dict = {}
    if path is not None:
        location = str(path)
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError("--config", location, f"cannot read file ({exc.strerror})") from None
        try:
            loaded = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            where = f"{location}:{mark.line + 1}" if mark else location
            raise ConfigError("<file>", where, f"YAML parse error: {exc}") from None
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError("<file>", location, "top level must be a mapping")
        _merge(tree, loaded, location, origins)
    for item in overrides:
        key, value = parse_override(item) if isinstance(item, str) else item
        _set_dotted(tree, key, value, "command line", origins)
    cfg, seg, overlap = resolve(tree, origins)
    resolved = {"sim": cfg.to_dict(), "psd": {"segment_len": seg, "overlap": overlap}}
    return RunManifest(cfg, seg, overlap, resolved, Path(out_dir))
