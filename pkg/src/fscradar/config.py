"""
Scenario files.

A scenario is a TOML document with the tables ``[plan]``, ``[scene]``,
``[receiver]``, ``[interference]`` (optional), ``[processing]`` and
``[output]``. Every physical quantity carries its unit in the key name
(``_hz``, ``_s``, ``_m``, ``_deg``, ``_rad_s``, ``_db``); values are never
rescaled. Unknown keys are rejected so that typos fail loudly. See the
README for the full key list and the recipes under ``fscradar/recipes``
for worked examples.
"""

from __future__ import annotations

import hashlib
import math
import re
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

from .errors import ConfigError, InvalidParameterError
from .plan import WaveformPlan
from .profile import WINDOWS
from .scene import GapSpec, Scene, make_two_target_scene, make_v_scene, scene_from_points

RECIPES = ("fig6", "fig7", "fig8", "fig9")
MODES = ("profile", "sweep", "isar", "gapfill")

_PLAN_KEYS = {
    "f_start_hz": "f_start", "b_chirp_hz": "b_chirp", "t_cw_s": "t_cw", "t_cr_s": "t_cr",
    "t_loop_s": "t_loop", "t_pr_s": "t_pr", "t_pw_s": "t_pw", "delta_f_hz": "delta_f",
    "f_offset_hz": "f_offset", "b_obpf_hz": "b_obpf", "n_sub": "n_sub",
}
_SCENE_COMMON = {"generator", "center_range_m", "omega_rad_s"}
_GENERATOR_KEYS = {
    "points": {"scatterers"},
    "two_target": {"separation_m"},
    "v_target": {"side_m", "angle_deg", "spacing_m", "tilt_deg"},
}
_GENERATOR_REQUIRED = {
    "points": {"scatterers"},
    "two_target": {"separation_m"},
    "v_target": {"side_m", "angle_deg", "spacing_m"},
}
_SCATTERER_KEYS = {"x_m", "y_m", "reflectivity"}
_RECEIVER_KEYS = {"sample_rate_hz", "snr_db", "rng_seed"}
_INTERFERENCE_KEYS = {"band_lo_hz", "band_hi_hz", "indices", "ar_order", "fill"}
_PROCESSING_KEYS = {
    "mode", "window", "fft_size", "n_used", "n_min", "n_max", "n_trains", "dwell_s",
    "slow_window", "zero_pad", "range_gate_m", "crossrange_limit_m", "min_separation_hz",
    "threshold_db", "max_range_m", "threads", "dynamic_range_db",
}
_OUTPUT_KEYS = {"directory", "format"}
_SECTIONS = {"plan", "scene", "receiver", "interference", "processing", "output"}


@dataclass(frozen=True)
class ProcessingConfig:
    mode: str = "profile"
    window: str = "rect"
    fft_size: Optional[int] = None
    n_used: tuple[int, ...] = ()
    n_min: int = 1
    n_max: Optional[int] = None
    n_trains: Optional[int] = None
    dwell_s: Optional[float] = None
    slow_window: str = "hann"
    zero_pad: int = 1
    range_gate_m: Optional[tuple[float, float]] = None
    crossrange_limit_m: Optional[float] = None
    min_separation_hz: Optional[float] = None
    threshold_db: float = -10.0
    max_range_m: Optional[float] = None
    threads: int = 1
    dynamic_range_db: float = 40.0


@dataclass(frozen=True)
class InterferenceConfig:
    gap: GapSpec
    ar_order: Optional[int] = None
    fill: bool = True


@dataclass(frozen=True)
class ScenarioConfig:
    plan: WaveformPlan
    scene: Scene
    sample_rate: float
    processing: ProcessingConfig
    interference: Optional[InterferenceConfig] = None
    out_dir: str = "out"
    out_format: str = "csv"
    source: str = ""
    source_name: str = "<string>"
    overrides: dict = field(default_factory=dict)

    @property
    def config_hash(self) -> str:
        """SHA-256 of the scenario text plus any command-line overrides."""
        h = hashlib.sha256(self.source.encode("utf-8"))
        for key in sorted(self.overrides):
            h.update(f"\n{key}={self.overrides[key]!r}".encode("utf-8"))
        return h.hexdigest()


def _line_of(text: str, section: str, key: Optional[str]) -> Optional[int]:
    """Best-effort 1-based line number of ``[section]`` or ``key`` inside it."""
    current = None
    head = re.compile(r"^\s*\[\[?\s*([A-Za-z0-9_.]+)\s*\]\]?")
    for no, line in enumerate(text.splitlines(), start=1):
        m = head.match(line)
        if m:
            current = m.group(1)
            if key is None and current == section:
                return no
            continue
        if key is not None and current is not None and current.split(".")[0] == section:
            if re.match(rf"^\s*{re.escape(key)}\s*=", line):
                return no
    return None


class _Reader:
    """Typed access to one table with location-aware diagnostics."""

    def __init__(self, text: str, name: str, section: str, table: dict, allowed: set):
        self.text, self.name, self.section, self.table = text, name, section, table
        if not isinstance(table, dict):
            self.fail(None, f"[{section}] must be a table")
        unknown = sorted(set(table) - allowed)
        if unknown:
            self.fail(unknown[0], f"unknown key '{section}.{unknown[0]}' "
                                  f"(allowed: {', '.join(sorted(allowed))})")

    def fail(self, key: Optional[str], msg: str):
        line = _line_of(self.text, self.section, key)
        where = f"{self.name}:{line}: " if line else f"{self.name}: "
        raise ConfigError(where + msg)

    def has(self, key: str) -> bool:
        return key in self.table

    def get(self, key: str, kind, default: Any = ..., *, check=None, what: str = ""):
        if key not in self.table:
            if default is ...:
                self.fail(None, f"missing required key '{self.section}.{key}'")
            return default
        v = self.table[key]
        if kind is float and isinstance(v, int) and not isinstance(v, bool):
            v = float(v)
        if kind is int and isinstance(v, bool):
            self.fail(key, f"'{self.section}.{key}' must be an integer")
        if not isinstance(v, kind):
            self.fail(key, f"'{self.section}.{key}' must be {kind.__name__}, got {type(v).__name__}")
        if check is not None and not check(v):
            self.fail(key, f"'{self.section}.{key}' = {v!r} is invalid{': ' + what if what else ''}")
        return v

    def get_list(self, key: str, kind, default: Any = ..., length: Optional[int] = None):
        raw = self.get(key, list, default)
        if raw is default and key not in self.table:
            return raw
        out = []
        for v in raw:
            if kind is float and isinstance(v, int) and not isinstance(v, bool):
                v = float(v)
            if not isinstance(v, kind) or isinstance(v, bool):
                self.fail(key, f"'{self.section}.{key}' must be a list of {kind.__name__}")
            out.append(v)
        if length is not None and len(out) != length:
            self.fail(key, f"'{self.section}.{key}' must have {length} entries")
        return tuple(out)


def _finite(v) -> bool:
    return math.isfinite(v)


def _positive(v) -> bool:
    return math.isfinite(v) and v > 0


def _parse_plan(text: str, name: str, doc: dict) -> WaveformPlan:
    r = _Reader(text, name, "plan", doc.get("plan", None) or _missing(text, name, "plan"),
                set(_PLAN_KEYS))
    values = {}
    for key, attr in _PLAN_KEYS.items():
        kind = int if key == "n_sub" else float
        values[attr] = r.get(key, kind, check=_finite, what="must be finite")
    return WaveformPlan(**values)


def _missing(text: str, name: str, section: str):
    raise ConfigError(f"{name}: missing required section [{section}]")


def _parse_scene(text: str, name: str, doc: dict, rng_seed: int, snr_db) -> Scene:
    table = doc.get("scene") or _missing(text, name, "scene")
    gen = table.get("generator", "points")
    if gen not in _GENERATOR_KEYS:
        _Reader(text, name, "scene", {}, set()).fail(
            "generator", f"unknown scene generator {gen!r}; choose one of {sorted(_GENERATOR_KEYS)}")
    r = _Reader(text, name, "scene", table, _SCENE_COMMON | _GENERATOR_KEYS[gen])
    for key in sorted(_GENERATOR_REQUIRED[gen]):
        if not r.has(key):
            r.fail(None, f"missing required key 'scene.{key}' for generator {gen!r}")
    center = r.get("center_range_m", float, 1.5, check=_positive, what="must be > 0")
    omega = r.get("omega_rad_s", float, 0.0, check=_finite, what="must be finite")
    common = dict(center_range=center, snr_db=snr_db, rng_seed=rng_seed)
    try:
        if gen == "two_target":
            sep = r.get("separation_m", float, check=_positive, what="must be > 0")
            sc = make_two_target_scene(sep, **common)
            return Scene(sc.scatterers, omega=omega, **common)
        if gen == "v_target":
            return make_v_scene(r.get("side_m", float), r.get("angle_deg", float),
                                r.get("spacing_m", float), tilt=r.get("tilt_deg", float, 0.0),
                                omega=omega, **common)
        rows = r.get("scatterers", list)
        if not rows:
            r.fail("scatterers", "scene needs at least one scatterer")
        pts = []
        for row in rows:
            sr = _Reader(text, name, "scene", row, _SCATTERER_KEYS)
            sr.section = "scene.scatterers"
            pts.append((sr.get("x_m", float, check=_finite), sr.get("y_m", float, check=_finite),
                        sr.get("reflectivity", float, 1.0)))
        return scene_from_points(pts, omega=omega, **common)
    except InvalidParameterError as exc:
        r.fail(None, f"invalid scene: {exc}")


def _parse_processing(text: str, name: str, doc: dict) -> ProcessingConfig:
    r = _Reader(text, name, "processing", doc.get("processing", {}), _PROCESSING_KEYS)
    pos_int = lambda v: v >= 1  # noqa: E731
    fft = r.get("fft_size", int, 0, check=lambda v: v == 0 or (v > 0 and v & (v - 1) == 0),
                what="0 (automatic) or a power of two")
    if r.has("n_trains") and r.has("dwell_s"):
        r.fail("dwell_s", "give either 'processing.n_trains' or 'processing.dwell_s', not both")
    gate = r.get_list("range_gate_m", float, None, length=2)
    if gate is not None and not gate[0] < gate[1]:
        r.fail("range_gate_m", "'processing.range_gate_m' must be [low, high] with low < high")
    return ProcessingConfig(
        mode=r.get("mode", str, "profile", check=lambda v: v in MODES, what=f"one of {MODES}"),
        window=r.get("window", str, "rect", check=lambda v: v in WINDOWS, what=f"one of {WINDOWS}"),
        fft_size=fft or None,
        n_used=r.get_list("n_used", int, ()),
        n_min=r.get("n_min", int, 1, check=pos_int, what="must be >= 1"),
        n_max=r.get("n_max", int, None, check=pos_int, what="must be >= 1"),
        n_trains=r.get("n_trains", int, None, check=lambda v: v >= 2, what="must be >= 2"),
        dwell_s=r.get("dwell_s", float, None, check=_positive, what="must be > 0"),
        slow_window=r.get("slow_window", str, "hann", check=lambda v: v in WINDOWS,
                          what=f"one of {WINDOWS}"),
        zero_pad=r.get("zero_pad", int, 1, check=pos_int, what="must be >= 1"),
        range_gate_m=gate,
        crossrange_limit_m=r.get("crossrange_limit_m", float, None, check=_positive),
        min_separation_hz=r.get("min_separation_hz", float, None, check=_positive),
        threshold_db=r.get("threshold_db", float, -10.0, check=lambda v: v < 0, what="must be < 0"),
        max_range_m=r.get("max_range_m", float, None, check=_positive),
        threads=r.get("threads", int, 1, check=pos_int, what="must be >= 1"),
        dynamic_range_db=r.get("dynamic_range_db", float, 40.0, check=_positive),
    )


def _parse_interference(text: str, name: str, doc: dict) -> Optional[InterferenceConfig]:
    if "interference" not in doc:
        return None
    r = _Reader(text, name, "interference", doc["interference"], _INTERFERENCE_KEYS)
    band = r.has("band_lo_hz") or r.has("band_hi_hz")
    if band == r.has("indices"):
        r.fail(None, "[interference] needs either band_lo_hz/band_hi_hz or indices")
    try:
        if band:
            gap = GapSpec(r.get("band_lo_hz", float), r.get("band_hi_hz", float))
        else:
            gap = GapSpec(indices=r.get_list("indices", int))
    except InvalidParameterError as exc:
        r.fail(None, str(exc))
    order = r.get("ar_order", int, 0, check=lambda v: v >= 0, what="must be >= 0 (0 = automatic)")
    return InterferenceConfig(gap, order or None, r.get("fill", bool, True))


def parse_config(text: str, name: str = "<string>", *, seed: Optional[int] = None,
                 threads: Optional[int] = None, out_dir: Optional[str] = None,
                 out_format: Optional[str] = None) -> ScenarioConfig:
    """Parse scenario text; keyword arguments override the file's values."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{name}: {exc}") from exc
    unknown = sorted(set(doc) - _SECTIONS)
    if unknown:
        line = _line_of(text, unknown[0], None)
        raise ConfigError(f"{name}:{line or '?'}: unknown section [{unknown[0]}]")

    plan = _parse_plan(text, name, doc)
    rr = _Reader(text, name, "receiver", doc.get("receiver", {}), _RECEIVER_KEYS)
    fs = rr.get("sample_rate_hz", float, 100e6, check=_positive, what="must be > 0")
    snr = rr.get("snr_db", float, None, check=lambda v: not math.isnan(v), what="must not be NaN")
    rng_seed = rr.get("rng_seed", int, 0, check=lambda v: v >= 0, what="must be >= 0")
    overrides = {}
    if seed is not None:
        rng_seed = overrides["seed"] = int(seed)
    scene = _parse_scene(text, name, doc, rng_seed, snr)
    proc = _parse_processing(text, name, doc)
    if threads is not None:
        proc = ProcessingConfig(**{**proc.__dict__, "threads": int(threads)})
    interference = _parse_interference(text, name, doc)
    ro = _Reader(text, name, "output", doc.get("output", {}), _OUTPUT_KEYS)
    directory = ro.get("directory", str, "out")
    fmt = ro.get("format", str, "csv", check=lambda v: v in ("csv", "raw"), what="csv or raw")
    if out_format is not None:
        fmt = overrides["format"] = out_format
    return ScenarioConfig(plan, scene, fs, proc, interference,
                          out_dir if out_dir is not None else directory, fmt,
                          text, name, overrides)


def recipe_path(name: str) -> Path:
    if name not in RECIPES:
        raise ConfigError(f"unknown recipe {name!r}; choose one of {RECIPES}")
    return Path(str(resources.files("fscradar") / "recipes" / f"{name}.toml"))


def load_config(path_or_recipe: str, **overrides) -> ScenarioConfig:
    """Read a scenario file, or a shipped recipe when given a bare recipe name."""
    p = Path(path_or_recipe)
    if not p.exists() and path_or_recipe in RECIPES:
        p = recipe_path(path_or_recipe)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path_or_recipe}: {exc.strerror or exc}") from exc
    return parse_config(text, str(path_or_recipe), **overrides)
