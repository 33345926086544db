"""
Command-line runner: ``fscradar <command> <scenario> [options]``.

Commands
--------
validate          check the plan and scene, print the constraint table
run               run the pipeline selected by ``processing.mode``
sweep-resolution  measured vs. theoretical resolution for a range of N
isar              form a range-Doppler image over many trains
gapfill           compare unmasked, masked and AR-filled results

``<scenario>`` is a TOML file or one of the shipped recipe names
(``fig6``, ``fig7``, ``fig8``, ``fig9``). Every run writes ``report.json``
into the output directory, listing each emitted file with its units,
axes and the scenario hash.

Exit status: 0 success, 2 scenario parse error, 3 constraint violation,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .config import MODES, RECIPES, ScenarioConfig, load_config
from .dechirp import apply_gap, dechirp_frame, subpulse_start_times
from .errors import (ConfigError, InvalidParameterError, MetrologyError, PlanError,
                     ReconstructionError)
from .gapfill import fill_gap
from .io import dump_json, write_csv, write_raw
from .isar import (IsarImage, aperture_angle, collect_trains, crop_image, cross_range_resolution,
                   form_image, image_correlation, mainlobe_widths, profile_stack,
                   trains_for_dwell, write_pgm)
from .plan import (CONSTRAINTS, SPEED_OF_LIGHT, Violation, center_wavelength, equivalent_bandwidth,
                   synthesized_band, theoretical_resolution, validate_plan)
from .profile import (RangeProfile, extract_peaks, measured_resolution, peak_sidelobe_db,
                      range_profile)
from .scene import delays
from .synth import SyntheticSignal, stitch

log = logging.getLogger("fscradar")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONSTRAINT = 3
EXIT_NUMERIC = 4


class ConstraintError(Exception):
    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


# --------------------------------------------------------------------------- checks

def _n_trains(cfg: ScenarioConfig) -> Optional[int]:
    p = cfg.processing
    if p.n_trains is not None:
        return p.n_trains
    if p.dwell_s is not None:
        return trains_for_dwell(cfg.plan, p.dwell_s)
    return None


def _n_values(cfg: ScenarioConfig, mode: str) -> list[int]:
    p = cfg.processing
    if mode == "sweep":
        hi = p.n_max if p.n_max is not None else cfg.plan.n_sub
        return list(range(p.n_min, hi + 1))
    return list(p.n_used) or [cfg.plan.n_sub]


def scene_violations(cfg: ScenarioConfig, mode: str) -> list[Violation]:
    """Checks that depend on the scene and receiver, not only on the plan."""
    plan, out = cfg.plan, []
    n_tr = _n_trains(cfg) if mode in ("isar", "gapfill") else None
    trains = np.arange(n_tr if n_tr else 1)
    tau = delays(cfg.scene, subpulse_start_times(plan, trains))
    beat = plan.k * tau.max()
    if not beat < 0.5 * cfg.sample_rate:
        out.append(Violation("beat < fs/2", f"max beat {beat:.6g} Hz, Nyquist "
                                             f"{0.5 * cfg.sample_rate:.6g} Hz"))
    if not (tau.min() >= 0 and tau.max() < plan.t_cw):
        out.append(Violation("0 ≤ τ < T_cw", f"delays span [{tau.min():.6g}, {tau.max():.6g}] s, "
                                             f"T_cw = {plan.t_cw:.6g} s"))
    nmax = plan.n_max
    bad = [n for n in _n_values(cfg, mode) if not 1 <= n <= nmax]
    if bad:
        out.append(Violation("1 ≤ N_used ≤ N_max", f"N values {bad} outside [1, {nmax}]"))
    if mode == "sweep" and not _n_values(cfg, mode):
        out.append(Violation("n_min ≤ n_max", "empty N range"))
    if mode == "isar" and n_tr is None:
        out.append(Violation("n_trains ≥ 2", "isar needs processing.n_trains or processing.dwell_s"))
    if cfg.interference is not None:
        idx = cfg.interference.gap.indices
        if idx is not None and any(not 0 <= i < plan.n_sub for i in idx):
            out.append(Violation("0 ≤ gap index < N", f"indices {list(idx)} with N={plan.n_sub}"))
    if mode == "gapfill" and cfg.interference is None:
        out.append(Violation("interference", "gapfill needs an [interference] table"))
    return out


def check(cfg: ScenarioConfig, mode: str) -> list[Violation]:
    plan_v = validate_plan(cfg.plan)
    if plan_v:
        return plan_v
    return scene_violations(cfg, mode)


def plan_summary(cfg: ScenarioConfig) -> dict:
    plan = cfg.plan
    b_eq = equivalent_bandwidth(plan)
    lo, hi = synthesized_band(plan)
    return {
        "M": int(round(plan.m_ratio)), "N_max": plan.n_max, "N": plan.n_sub,
        "B_eq_hz": b_eq, "R_theory_m": theoretical_resolution(b_eq),
        "band_lo_hz": lo, "band_hi_hz": hi, "chirp_rate_hz_per_s": plan.k,
        "center_wavelength_m": center_wavelength(plan),
        "parameters": plan.to_dict(),
    }


# --------------------------------------------------------------------------- outputs

class Outputs:
    """Writes artifacts into one directory and records them for the report."""

    def __init__(self, directory: Path, cfg: ScenarioConfig):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.hash = cfg.config_hash
        self.format = cfg.out_format
        self.files: list[dict] = []

    def _record(self, path: Path, kind: str, units: dict, axes: dict) -> str:
        name = path.relative_to(self.dir).as_posix()
        self.files.append({"path": name, "kind": kind, "units": units, "axes": axes,
                           "config_hash": self.hash})
        return name

    def spectrum(self, stem: str, profile: RangeProfile, max_range: Optional[float]) -> str:
        sel = slice(None) if max_range is None else profile.range_axis <= max_range
        units = {"freq": "Hz", "range": "m", "magnitude": "dB re. peak", "spectrum": "a.u."}
        axes = {"rows": "beat-frequency bins", "window": profile.window_name,
                "fft_size": profile.fft_size, "bin_hz": profile.bin_hz}
        if self.format == "raw":
            path = self.dir / f"{stem}.f64"
            write_raw(path, profile.spectrum[sel], columns=["re", "im"],
                      freq_start_hz=float(profile.freq_axis[sel][0]), bin_hz=profile.bin_hz,
                      chirp_rate_hz_per_s=profile.k, units=units, config_hash=self.hash)
            return self._record(path, "spectrum/raw", units, axes)
        path = self.dir / f"{stem}.csv"
        db = profile.magnitude_db()[sel]
        z = profile.spectrum[sel]
        write_csv(path, ["freq_hz", "range_m", "mag_db", "re", "im"],
                  zip(profile.freq_axis[sel], profile.range_axis[sel], db, z.real, z.imag))
        return self._record(path, "spectrum/csv", units, axes)

    def signal(self, stem: str, sig: SyntheticSignal) -> Optional[str]:
        if self.format != "raw":
            return None
        path = self.dir / f"{stem}.f64"
        units = {"samples": "a.u.", "time": "s"}
        write_raw(path, sig.samples, sample_rate_hz=sig.sample_rate, t0_s=0.0,
                  chirp_rate_hz_per_s=sig.k, gaps=sig.gaps(), units=units, config_hash=self.hash)
        return self._record(path, "signal/raw", units, {"rows": "samples at 1/sample_rate"})

    def table(self, stem: str, header: Sequence[str], rows, units: dict) -> str:
        path = write_csv(self.dir / f"{stem}.csv", header, rows)
        return self._record(path, "table/csv", units, {"columns": list(header)})

    def image(self, stem: str, img: IsarImage, dynamic_range_db: float) -> str:
        pgm = write_pgm(img, self.dir / f"{stem}.pgm", dynamic_range_db)
        rows = [("range", i, v) for i, v in enumerate(img.range_axis)]
        rows += [("crossrange", j, v) for j, v in enumerate(img.crossrange_axis)]
        write_csv(self.dir / f"{stem}_axes.csv", ["axis", "index", "value_m"], rows)
        units = {"pixel": f"dB re. peak, 0..65535 over {dynamic_range_db:g} dB", "axes": "m"}
        axes = {"rows": "range (m), ascending", "columns": "cross-range (m), ascending",
                "shape": list(img.pixels.shape), "axes_file": f"{stem}_axes.csv"}
        self._record(self.dir / f"{stem}_axes.csv", "axes/csv", {"value": "m"},
                     {"rows": "axis, index"})
        return self._record(pgm, "image/pgm", units, axes)


# --------------------------------------------------------------------------- pipelines

def _signal(cfg: ScenarioConfig, n_sub: int, *, gap: bool, fill: bool) -> SyntheticSignal:
    plan = cfg.plan.with_n(n_sub)
    frame = dechirp_frame(plan, cfg.scene, 0, cfg.sample_rate)
    if gap and cfg.interference is not None:
        frame = apply_gap(frame, cfg.interference.gap, plan)
    sig = stitch(frame, plan)
    if fill and sig.gap_mask.any():
        sig = fill_gap(sig, cfg.interference.ar_order)
    return sig


def _min_separation(cfg: ScenarioConfig, sig: SyntheticSignal) -> float:
    if cfg.processing.min_separation_hz is not None:
        return cfg.processing.min_separation_hz
    return 0.5 / sig.duration


def _peak_rows(peaks, k) -> list[dict]:
    rows = []
    for p in peaks:
        res = measured_resolution(p.mainlobe_width_hz, k) if p.mainlobe_width_hz > 0 else math.nan
        rows.append({"frequency_hz": p.frequency, "range_m": p.range, "magnitude_db": p.magnitude_db,
                     "width_hz": p.mainlobe_width_hz, "resolution_m": res})
    return rows


def _map(cfg: ScenarioConfig, fn, items):
    if cfg.processing.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.processing.threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def run_profiles(cfg: ScenarioConfig, out: Outputs) -> dict:
    p = cfg.processing
    use_gap = cfg.interference is not None
    fill = use_gap and cfg.interference.fill

    def one(n):
        sig = _signal(cfg, n, gap=use_gap, fill=fill)
        prof = range_profile(sig, p.window, p.fft_size)
        return sig, prof, extract_peaks(prof, _min_separation(cfg, sig), p.threshold_db)

    results = []
    for n, (sig, prof, peaks) in zip(_n_values(cfg, "profile"),
                                     _map(cfg, one, _n_values(cfg, "profile"))):
        b_eq = equivalent_bandwidth(cfg.plan.with_n(n))
        rows = _peak_rows(peaks, sig.k)
        spacing = abs(rows[1]["frequency_hz"] - rows[0]["frequency_hz"]) if len(rows) > 1 else None
        entry = {"N": n, "B_eq_hz": b_eq, "R_theory_m": theoretical_resolution(b_eq),
                 "n_peaks": len(rows), "peaks": rows, "spacing_hz": spacing,
                 "spacing_m": None if spacing is None else spacing * SPEED_OF_LIGHT / (2 * sig.k),
                 "spectrum_file": out.spectrum(f"profile_N{n}", prof, p.max_range_m)}
        out.signal(f"signal_N{n}", sig)
        out.table(f"peaks_N{n}", ["frequency_hz", "range_m", "magnitude_db", "width_hz",
                                  "resolution_m"],
                  [[r[c] for c in ("frequency_hz", "range_m", "magnitude_db", "width_hz",
                                   "resolution_m")] for r in rows],
                  {"frequency_hz": "Hz", "range_m": "m", "magnitude_db": "dB", "width_hz": "Hz",
                   "resolution_m": "m"})
        results.append(entry)
    return {"profiles": results}


def run_sweep(cfg: ScenarioConfig, out: Outputs) -> dict:
    p = cfg.processing
    ns = _n_values(cfg, "sweep")

    def one(n):
        sig = _signal(cfg, n, gap=False, fill=False)
        prof = range_profile(sig, p.window, p.fft_size)
        peaks = extract_peaks(prof, _min_separation(cfg, sig), p.threshold_db)
        if not peaks or not peaks[0].mainlobe_width_hz > 0:
            raise MetrologyError(f"no measurable mainlobe at N={n}")
        return sig, peaks[0]

    rows = []
    for n, (sig, pk) in zip(ns, _map(cfg, one, ns)):
        b_eq = equivalent_bandwidth(cfg.plan.with_n(n))
        theory = theoretical_resolution(b_eq)
        meas = measured_resolution(pk.mainlobe_width_hz, sig.k)
        rows.append({"N": n, "B_eq_hz": b_eq, "R_theory_m": theory,
                     "width_hz": pk.mainlobe_width_hz, "R_measured_m": meas,
                     "relative_error": meas / theory - 1.0})
    cols = ["N", "B_eq_hz", "R_theory_m", "width_hz", "R_measured_m", "relative_error"]
    f = out.table("resolution", cols, [[r[c] for c in cols] for r in rows],
                  {"B_eq_hz": "Hz", "R_theory_m": "m", "width_hz": "Hz", "R_measured_m": "m",
                   "relative_error": "1"})
    return {"resolution": rows, "resolution_file": f}


def _image(cfg: ScenarioConfig, n_trains: int, *, gap: bool, fill: bool) -> IsarImage:
    p = cfg.processing
    t0 = time.perf_counter()
    sigs = collect_trains(cfg.plan, cfg.scene, n_trains, cfg.sample_rate,
                          gap=cfg.interference.gap if gap else None, fill=fill,
                          ar_order=cfg.interference.ar_order if fill else None,
                          threads=p.threads)
    profs = profile_stack(sigs, p.window, p.fft_size, p.range_gate_m)
    img = form_image(profs, center_wavelength(cfg.plan),
                     aperture_angle(cfg.scene, cfg.plan, n_trains), p.slow_window, p.zero_pad)
    if p.crossrange_limit_m is not None:
        img = crop_image(img, p.crossrange_limit_m)
    log.info("image (gap=%s, fill=%s) from %d trains in %.2f s", gap, fill, n_trains,
             time.perf_counter() - t0)
    return img


def _step(axis: np.ndarray) -> Optional[float]:
    # a tight crop of a short aperture can leave a single column
    return float(axis[1] - axis[0]) if axis.size > 1 else None


def _image_summary(img: IsarImage) -> dict:
    r, x = img.peak()
    try:
        wr, wx = mainlobe_widths(img)
    except MetrologyError:
        wr = wx = None
    return {"peak_range_m": r, "peak_crossrange_m": x, "width_range_m": wr,
            "width_crossrange_m": wx, "shape": list(img.pixels.shape),
            "range_bin_m": _step(img.range_axis), "crossrange_bin_m": _step(img.crossrange_axis)}


def run_isar(cfg: ScenarioConfig, out: Outputs) -> dict:
    n_tr = _n_trains(cfg)
    use_gap = cfg.interference is not None
    fill = use_gap and cfg.interference.fill
    img = _image(cfg, n_tr, gap=use_gap, fill=fill)
    dtheta = aperture_angle(cfg.scene, cfg.plan, n_tr)
    res = {"n_trains": n_tr, "aperture_rad": dtheta, "aperture_deg": math.degrees(dtheta),
           "R_theory_m": theoretical_resolution(equivalent_bandwidth(cfg.plan)),
           "crossrange_theory_m": (cross_range_resolution(center_wavelength(cfg.plan), dtheta)
                                   if 0 < dtheta < math.pi else None),
           "image": _image_summary(img),
           "image_file": out.image("image", img, cfg.processing.dynamic_range_db)}
    return {"isar": res}


def _gap_rms_error(ref: SyntheticSignal, test: SyntheticSignal, mask: np.ndarray) -> float:
    scale = math.sqrt(float(np.mean(ref.samples[ref.samples != 0] ** 2)))
    err = math.sqrt(float(np.mean((test.samples[mask] - ref.samples[mask]) ** 2)))
    return err / scale


def run_gapfill(cfg: ScenarioConfig, out: Outputs) -> dict:
    p = cfg.processing
    n = cfg.plan.n_sub
    ref = _signal(cfg, n, gap=False, fill=False)
    masked = _signal(cfg, n, gap=True, fill=False)
    filled = fill_gap(masked, cfg.interference.ar_order) if masked.gap_mask.any() else masked
    window = p.window
    beats = cfg.plan.k * delays(cfg.scene, 0.0)
    guard = 3.0 / ref.duration
    entry = {"masked_subpulses": cfg.interference.gap.resolve(cfg.plan),
             "gaps": masked.gaps(), "window": window, "guard_hz": guard}
    for label, sig in (("unmasked", ref), ("unfilled", masked), ("filled", filled)):
        prof = range_profile(sig, window, p.fft_size)
        entry[f"spurious_db_{label}"] = peak_sidelobe_db(prof, beats, guard)
        entry[f"spectrum_file_{label}"] = out.spectrum(f"profile_{label}", prof, p.max_range_m)
        out.signal(f"signal_{label}", sig)
    entry["sidelobe_improvement_db"] = entry["spurious_db_unfilled"] - entry["spurious_db_filled"]
    if masked.gap_mask.any():
        entry["gap_rms_error_unfilled"] = _gap_rms_error(ref, masked, masked.gap_mask)
        entry["gap_rms_error_filled"] = _gap_rms_error(ref, filled, masked.gap_mask)

    n_tr = _n_trains(cfg)
    if n_tr is not None and cfg.scene.omega != 0:
        imgs = {"unmasked": _image(cfg, n_tr, gap=False, fill=False),
                "unfilled": _image(cfg, n_tr, gap=True, fill=False),
                "filled": _image(cfg, n_tr, gap=True, fill=True)}
        for label, img in imgs.items():
            entry[f"image_file_{label}"] = out.image(f"image_{label}", img, p.dynamic_range_db)
        entry["n_trains"] = n_tr
        entry["correlation_unfilled"] = image_correlation(imgs["unfilled"], imgs["unmasked"])
        entry["correlation_filled"] = image_correlation(imgs["filled"], imgs["unmasked"])
    return {"gapfill": entry}


PIPELINES = {"profile": run_profiles, "sweep": run_sweep, "isar": run_isar,
             "gapfill": run_gapfill}


def run_scenario(cfg: ScenarioConfig, mode: Optional[str] = None, command: str = "run") -> dict:
    """Check the scenario, run one pipeline, write ``report.json``; returns the report."""
    mode = mode or cfg.processing.mode
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}")
    violations = check(cfg, mode)
    if violations:
        raise ConstraintError(violations)
    out = Outputs(Path(cfg.out_dir), cfg)
    t0 = time.perf_counter()
    with np.errstate(divide="ignore"):
        results = PIPELINES[mode](cfg, out)
    log.info("%s finished in %.2f s", mode, time.perf_counter() - t0)
    report = {
        "tool": {"name": "fscradar", "version": __version__},
        "command": command, "mode": mode,
        "scenario": {"name": cfg.source_name, "config_hash": cfg.config_hash,
                     "overrides": cfg.overrides},
        "plan": plan_summary(cfg),
        "receiver": {"sample_rate_hz": cfg.sample_rate, "snr_db": cfg.scene.snr_db,
                     "rng_seed": cfg.scene.rng_seed},
        "scene": {"n_scatterers": len(cfg.scene.scatterers), "center_range_m": cfg.scene.center_range,
                  "omega_rad_s": cfg.scene.omega},
        "results": results,
        "files": out.files,
    }
    (out.dir / "report.json").write_text(dump_json(report), encoding="utf-8")
    return report


# --------------------------------------------------------------------------- commands

def constraint_table(cfg: ScenarioConfig, mode: str) -> tuple[list[str], list[Violation]]:
    plan_v = validate_plan(cfg.plan)
    failed = {v.constraint: v for v in plan_v}
    lines = [f"{'constraint':<22} status  detail"]
    skip = "positive" in failed
    for label in CONSTRAINTS:
        if label in failed:
            lines.append(f"{label:<22} FAIL    {failed[label].detail}")
        elif skip:
            lines.append(f"{label:<22} skipped")
        else:
            lines.append(f"{label:<22} ok")
    scene_v = [] if plan_v else scene_violations(cfg, mode)
    for v in scene_v:
        lines.append(f"{v.constraint:<22} FAIL    {v.detail}")
    if not plan_v and not scene_v:
        lines.append(f"{'scene sanity':<22} ok")
    return lines, plan_v + scene_v


def cmd_validate(cfg: ScenarioConfig, args) -> int:
    lines, violations = constraint_table(cfg, cfg.processing.mode)
    print("\n".join(lines))
    if violations:
        print(f"invalid: {len(violations)} violation(s)")
        for v in violations:
            print(f"  - {v}", file=sys.stderr)
        return EXIT_CONSTRAINT
    s = plan_summary(cfg)
    print(f"valid, M={s['M']}, N_max={s['N_max']}, B_eq={s['B_eq_hz'] / 1e9:.1f} GHz, "
          f"R_theory={s['R_theory_m'] * 1e3:.2f} mm")
    return EXIT_OK


def _summarize(report: dict) -> str:
    res = report["results"]
    if "resolution" in res:
        return "\n".join(f"N={r['N']}: measured {r['R_measured_m'] * 1e3:.3f} mm, "
                         f"theory {r['R_theory_m'] * 1e3:.3f} mm" for r in res["resolution"])
    if "profiles" in res:
        return "\n".join(
            f"N={r['N']}: {r['n_peaks']} peak(s)"
            + (f", spacing {r['spacing_hz'] / 1e3:.2f} kHz" if r["spacing_hz"] else "")
            for r in res["profiles"])
    if "isar" in res:
        i = res["isar"]
        return f"image from {i['n_trains']} trains, aperture {i['aperture_deg']:.2f} deg"
    g = res["gapfill"]
    text = (f"masked subpulses {g['masked_subpulses']}, spurious sidelobe "
            f"{g['spurious_db_unfilled']:.1f} dB -> {g['spurious_db_filled']:.1f} dB")
    if "correlation_filled" in g:
        text += (f"\nimage correlation vs. unmasked: unfilled {g['correlation_unfilled']:.5f}, "
                 f"filled {g['correlation_filled']:.5f}")
    return text


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fscradar",
                                 description="Frequency-stepped chirp radar simulator.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("scenario", help=f"TOML scenario file or recipe name ({', '.join(RECIPES)})")
        p.add_argument("--out-dir", help="output directory (overrides output.directory)")
        p.add_argument("--seed", type=int, help="noise seed (overrides receiver.rng_seed)")
        p.add_argument("--threads", type=int, help="worker threads (overrides processing.threads)")
        p.add_argument("--format", choices=("csv", "raw"), dest="fmt",
                       help="data export format (overrides output.format)")
        p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
        return p

    common(sub.add_parser("validate", help="check constraints and print the plan summary"))
    common(sub.add_parser("run", help="run the pipeline named by processing.mode"))
    sw = common(sub.add_parser("sweep-resolution", help="resolution versus subpulse count"))
    sw.add_argument("--n-min", type=int, help="smallest N (overrides processing.n_min)")
    sw.add_argument("--n-max", type=int, help="largest N (overrides processing.n_max)")
    common(sub.add_parser("isar", help="form an ISAR image"))
    common(sub.add_parser("gapfill", help="interference gap and AR fill comparison"))
    return ap


_COMMAND_MODE = {"run": None, "sweep-resolution": "sweep", "isar": "isar", "gapfill": "gapfill"}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.scenario, seed=args.seed, threads=args.threads,
                          out_dir=args.out_dir, out_format=args.fmt)
        if args.command == "sweep-resolution" and (args.n_min or args.n_max):
            proc = replace(cfg.processing,
                           n_min=args.n_min or cfg.processing.n_min,
                           n_max=args.n_max or cfg.processing.n_max)
            overrides = dict(cfg.overrides, n_min=proc.n_min, n_max=proc.n_max)
            cfg = replace(cfg, processing=proc, overrides=overrides)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate":
        return cmd_validate(cfg, args)
    try:
        report = run_scenario(cfg, _COMMAND_MODE[args.command], args.command)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConstraintError, PlanError) as exc:
        print("constraint violations:", file=sys.stderr)
        for v in exc.violations:
            print(f"  - {v}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except (MetrologyError, ReconstructionError, InvalidParameterError, FloatingPointError,
            np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(_summarize(report))
    print(f"wrote {len(report['files']) + 1} file(s) to {cfg.out_dir}")
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
