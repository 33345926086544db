"""
Range-Doppler ISAR imaging of a scene on a turntable.

One synthetic record is collected per train (slow time ``m * t_pr``); each
is turned into a range profile and an FFT across slow time in every range
bin separates scatterers by Doppler, i.e. by cross-range. For a scatterer
at cross-range ``x`` the profile phase advances by ``-4*pi*x*omega/lambda``
per second, so Doppler bins map to cross-range through ``-lambda/(2*omega)``.
"""

from __future__ import annotations

import logging
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .dechirp import apply_gap, dechirp_block
from .errors import InvalidParameterError, MetrologyError
from .gapfill import fill_gap
from .plan import WaveformPlan, require_valid
from .profile import (MAINLOBE_DB, RangeProfile, _crossing, _parabolic, beat_to_range,
                      default_fft_size, make_window)
from .scene import GapSpec, Scene
from .synth import SyntheticSignal, stitch

log = logging.getLogger(__name__)

_TRAIN_CHUNK = 64


@dataclass(frozen=True)
class IsarImage:
    pixels: np.ndarray           # (range bins, cross-range bins), complex
    range_axis: np.ndarray       # m, ascending
    crossrange_axis: np.ndarray  # m, ascending
    center_wavelength: float
    aperture_angle: float

    def magnitude_db(self, floor_db: float | None = None) -> np.ndarray:
        mag = np.abs(self.pixels)
        ref = mag.max()
        if ref == 0:
            db = np.full(mag.shape, -np.inf)
        else:
            db = 20 * np.log10(np.maximum(mag, 1e-300) / ref)
        return db if floor_db is None else np.maximum(db, floor_db)

    def peak(self) -> tuple[float, float]:
        """(range, cross-range) of the brightest pixel."""
        i, j = np.unravel_index(np.argmax(np.abs(self.pixels)), self.pixels.shape)
        return float(self.range_axis[i]), float(self.crossrange_axis[j])


def cross_range_resolution(center_wavelength: float, aperture_angle: float) -> float:
    """lambda / (2 * delta_theta)."""
    if not (center_wavelength > 0 and 0 < aperture_angle < math.pi):
        raise InvalidParameterError("need wavelength > 0 and 0 < aperture < pi")
    return center_wavelength / (2.0 * aperture_angle)


def aperture_angle(scene: Scene, plan: WaveformPlan, n_trains: int) -> float:
    return abs(scene.omega) * n_trains * plan.t_pr


def trains_for_dwell(plan: WaveformPlan, dwell: float) -> int:
    """Number of whole trains that fit in ``dwell`` seconds."""
    if not dwell > 0:
        raise InvalidParameterError(f"dwell must be > 0, got {dwell}")
    return int(math.floor(dwell / plan.t_pr + 1e-9))


def collect_trains(plan: WaveformPlan, scene: Scene, n_trains: int, sample_rate: float = 100e6,
                   *, gap: GapSpec | None = None, fill: bool = False, ar_order: int | None = None,
                   threads: int = 1) -> list[SyntheticSignal]:
    """Simulate and stitch trains ``0..n_trains-1``.

    With ``gap`` set, the interfered rows of every train are zeroed; with
    ``fill`` the resulting gap is then reconstructed per train.
    """
    require_valid(plan)
    if n_trains < 2:
        raise InvalidParameterError(f"need at least 2 trains, got {n_trains}")

    def work(lo: int) -> list[SyntheticSignal]:
        frames = dechirp_block(plan, scene, range(lo, min(lo + _TRAIN_CHUNK, n_trains)), sample_rate)
        out = []
        for fr in frames:
            if gap is not None:
                fr = apply_gap(fr, gap, plan)
            sig = stitch(fr, plan)
            if fill and sig.gap_mask.any():
                sig = fill_gap(sig, ar_order)
            out.append(sig)
        return out

    starts = range(0, n_trains, _TRAIN_CHUNK)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(work, starts))
    else:
        chunks = [work(lo) for lo in starts]
    return [s for chunk in chunks for s in chunk]


def crop_profile(profile: RangeProfile, r_lo: float, r_hi: float) -> RangeProfile:
    sel = np.flatnonzero((profile.range_axis >= r_lo) & (profile.range_axis <= r_hi))
    if sel.size == 0:
        raise InvalidParameterError(f"range gate [{r_lo}, {r_hi}] m selects no bins")
    s = slice(sel[0], sel[-1] + 1)
    return replace(profile, spectrum=profile.spectrum[s], freq_axis=profile.freq_axis[s],
                   range_axis=profile.range_axis[s])


def profile_stack(signals: Sequence[SyntheticSignal], window: str = "rect",
                  fft_size: int | None = None,
                  range_gate: tuple[float, float] | None = None) -> list[RangeProfile]:
    """Range profiles of many records, computed in blocks and optionally gated."""
    if not signals:
        return []
    n = signals[0].samples.size
    if any(s.samples.size != n for s in signals):
        raise InvalidParameterError("all records must have the same length")
    fft_size = default_fft_size(n) if fft_size is None else fft_size
    fs, k = signals[0].sample_rate, signals[0].k
    freqs = np.fft.rfftfreq(fft_size, 1.0 / fs)
    ranges = beat_to_range(freqs, k)
    sel = slice(None)
    if range_gate is not None:
        idx = np.flatnonzero((ranges >= range_gate[0]) & (ranges <= range_gate[1]))
        if idx.size == 0:
            raise InvalidParameterError(f"range gate {range_gate} selects no bins")
        sel = slice(idx[0], idx[-1] + 1)
    win = make_window(window, n)
    out = []
    for lo in range(0, len(signals), _TRAIN_CHUNK):
        block = np.stack([s.samples for s in signals[lo:lo + _TRAIN_CHUNK]])
        spec = np.fft.rfft(block * win, fft_size, axis=1)[:, sel]
        for row in spec:
            out.append(RangeProfile(row.copy(), freqs[sel], ranges[sel], window, fft_size,
                                    float(fs), float(k), n))
    return out


def form_image(profiles: Sequence[RangeProfile], center_wavelength: float,
               aperture_angle: float, window: str = "hann",
               zero_pad: int = 1) -> IsarImage:
    """FFT across slow time in every range bin.

    The slow-time FFT is scaled by ``1/sqrt(n_fft)`` so image energy equals
    the energy of the (windowed) profile stack.
    """
    if len(profiles) < 2:
        raise InvalidParameterError("need at least 2 range profiles")
    n_bins = profiles[0].spectrum.size
    if any(p.spectrum.size != n_bins for p in profiles):
        raise InvalidParameterError("range profiles differ in length")
    if not (center_wavelength > 0 and aperture_angle > 0):
        raise InvalidParameterError("wavelength and aperture must be positive")
    m = len(profiles)
    n_fft = int(zero_pad) * m
    stack = np.stack([p.spectrum for p in profiles])          # (slow, range)
    stack = stack * make_window(window, m)[:, None]
    dop = np.fft.fftshift(np.fft.fft(stack, n_fft, axis=0), axes=0) / math.sqrt(n_fft)
    # cycles per train -> cross-range; negative Doppler is positive x
    cyc = np.fft.fftshift(np.fft.fftfreq(n_fft))
    xr = -cyc * center_wavelength * m / (2.0 * aperture_angle)
    pixels = dop.T[:, ::-1]
    return IsarImage(np.ascontiguousarray(pixels), profiles[0].range_axis.copy(), xr[::-1].copy(),
                     center_wavelength, aperture_angle)


def image_energy(img: IsarImage) -> float:
    return float(np.sum(np.abs(img.pixels) ** 2))


def _width_along(values: np.ndarray, axis_vals: np.ndarray, i: int) -> float:
    db = 20 * np.log10(np.maximum(np.abs(values), 1e-300))
    off, top = _parabolic(db, i)
    level = top - MAINLOBE_DB
    left = _crossing(db, i, level, -1)
    right = _crossing(db, i, level, +1)
    step = axis_vals[1] - axis_vals[0]
    return float((right - left) * step)


def mainlobe_widths(img: IsarImage) -> tuple[float, float]:
    """-3.92 dB widths (m) of the brightest pixel's lobe in range and cross-range."""
    i, j = np.unravel_index(np.argmax(np.abs(img.pixels)), img.pixels.shape)
    try:
        wr = _width_along(img.pixels[:, j], img.range_axis, i)
        wx = _width_along(img.pixels[i, :], img.crossrange_axis, j)
    except MetrologyError as exc:
        raise MetrologyError(f"image mainlobe not measurable: {exc}") from exc
    return wr, wx


def image_correlation(a: IsarImage, b: IsarImage) -> float:
    """Normalized correlation of the two magnitude images."""
    ma, mb = np.abs(a.pixels), np.abs(b.pixels)
    if ma.shape != mb.shape:
        raise InvalidParameterError("images differ in shape")
    den = math.sqrt(float(np.sum(ma * ma)) * float(np.sum(mb * mb)))
    return float(np.sum(ma * mb) / den) if den > 0 else 0.0


def crop_image(img: IsarImage, crossrange_limit: float) -> IsarImage:
    sel = np.abs(img.crossrange_axis) <= crossrange_limit
    return replace(img, pixels=img.pixels[:, sel], crossrange_axis=img.crossrange_axis[sel])


def write_pgm(img: IsarImage, path, dynamic_range_db: float = 40.0) -> Path:
    """16-bit binary PGM (P5) of the dB magnitude, near range on the top row."""
    path = Path(path)
    db = img.magnitude_db(-dynamic_range_db)
    scaled = np.rint((db + dynamic_range_db) / dynamic_range_db * 65535.0)
    data = np.clip(scaled, 0, 65535).astype(">u2")
    h, w = data.shape
    with path.open("wb") as fh:
        fh.write(f"P5\n{w} {h}\n65535\n".encode("ascii"))
        fh.write(data.tobytes())
    return path


def read_pgm(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    m = re.match(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s", raw)
    if m is None:
        raise InvalidParameterError("not a binary PGM")
    w, h, maxval = (int(g) for g in m.groups())
    dtype = ">u2" if maxval > 255 else "u1"
    return np.frombuffer(raw[m.end():], dtype=dtype).reshape(h, w)
