"""
Range profiles and resolution metrology.

A de-chirped echo from delay ``tau`` is a tone at ``k * tau``, so the
spectrum of the synthetic record doubles as a range profile with
``R = c * f / (2 k)``. Resolution is read off the mainlobe at -3.92 dB:
for a rectangular record of length T the two-sided width there is 1/T
(``|sinc(1/2)| = 2/pi``), which maps exactly to ``c / 2B``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import windows as sigwin

from .errors import InvalidParameterError, MetrologyError
from .plan import SPEED_OF_LIGHT
from .synth import SyntheticSignal

MAINLOBE_DB = 3.92
WINDOWS = ("rect", "hann", "hamming", "taylor")
_TINY = 1e-300


@dataclass(frozen=True)
class RangeProfile:
    spectrum: np.ndarray   # one-sided complex spectrum, rfft of the windowed record
    freq_axis: np.ndarray  # Hz
    range_axis: np.ndarray # m
    window_name: str
    fft_size: int
    sample_rate: float
    k: float
    signal_length: int

    @property
    def bin_hz(self) -> float:
        return self.sample_rate / self.fft_size

    def magnitude_db(self) -> np.ndarray:
        mag = np.abs(self.spectrum)
        ref = mag.max()
        if ref == 0:
            return np.full(mag.shape, -np.inf)
        return 20 * np.log10(np.maximum(mag, _TINY) / ref)


@dataclass(frozen=True)
class Peak:
    frequency: float
    range: float
    magnitude_db: float
    mainlobe_width_hz: float
    bin: int


def next_pow2(n: int) -> int:
    return 1 << max(int(n) - 1, 0).bit_length()


def default_fft_size(length: int) -> int:
    return next_pow2(8 * length)


def make_window(name: str, length: int) -> np.ndarray:
    if name == "rect":
        return np.ones(length)
    if name == "hann":
        return sigwin.hann(length, sym=False)
    if name == "hamming":
        return sigwin.hamming(length, sym=False)
    if name == "taylor":
        return sigwin.taylor(length, nbar=5, sll=40, norm=True, sym=False)
    raise InvalidParameterError(f"unknown window {name!r}; choose one of {WINDOWS}")


def beat_to_range(freq, k: float):
    return SPEED_OF_LIGHT * np.asarray(freq) / (2.0 * k)


def range_spectrum(samples: np.ndarray, sample_rate: float, k: float,
                   window: str = "rect", fft_size: int | None = None) -> RangeProfile:
    x = np.asarray(samples, dtype=float)
    n = x.size
    fft_size = default_fft_size(n) if fft_size is None else int(fft_size)
    if fft_size < n or fft_size & (fft_size - 1):
        raise InvalidParameterError(
            f"fft_size must be a power of two >= signal length {n}, got {fft_size}")
    spec = np.fft.rfft(x * make_window(window, n), fft_size)
    freqs = np.fft.rfftfreq(fft_size, 1.0 / sample_rate)
    return RangeProfile(spec, freqs, beat_to_range(freqs, k), window, fft_size,
                        float(sample_rate), float(k), n)


def range_profile(sig: SyntheticSignal, window: str = "rect",
                  fft_size: int | None = None) -> RangeProfile:
    """Zero-padded one-sided spectrum of a synthetic record with range axis."""
    return range_spectrum(sig.samples, sig.sample_rate, sig.k, window, fft_size)


def spectral_energy(profile: RangeProfile) -> float:
    """Time-domain energy recovered from the one-sided spectrum (Parseval)."""
    p = np.abs(profile.spectrum) ** 2
    m = profile.fft_size
    inner = p[1:-1].sum() if m % 2 == 0 else p[1:].sum()
    edge = p[0] + (p[-1] if m % 2 == 0 else 0.0)
    return float((edge + 2 * inner) / m)


def _parabolic(db: np.ndarray, i: int) -> tuple[float, float]:
    """Vertex (offset in bins, value) of a parabola through bins i-1, i, i+1."""
    if i <= 0 or i >= db.size - 1:
        return 0.0, float(db[i])
    a, b, c = db[i - 1], db[i], db[i + 1]
    den = a - 2 * b + c
    if not np.isfinite(den) or den >= 0:
        return 0.0, float(b)
    off = 0.5 * (a - c) / den
    return float(off), float(b - 0.25 * (a - c) * off)


def _crossing(db: np.ndarray, i: int, level: float, direction: int) -> float:
    """Fractional bin where ``db`` first drops below ``level`` walking from ``i``."""
    j = i
    while True:
        nxt = j + direction
        if nxt < 0 or nxt >= db.size:
            raise MetrologyError("spectrum edge reached before the -3.92 dB crossing")
        if db[nxt] < level:
            # linear interpolation of the amplitude between j and nxt; near
            # the -3.92 dB point a sinc lobe is close to a straight line in
            # amplitude, much less so in dB
            a, b, t = 10 ** (db[j] / 20), 10 ** (db[nxt] / 20), 10 ** (level / 20)
            return j + direction * (a - t) / (a - b)
        if db[nxt] > db[j]:
            raise MetrologyError("mainlobe rises again before the -3.92 dB crossing")
        j = nxt


def _half_widths(db: np.ndarray, peak_bin: int, drop_db: float) -> tuple[float | None, float | None]:
    off, top = _parabolic(db, peak_bin)
    level = top - drop_db
    sides = []
    for direction in (-1, 1):
        try:
            sides.append(abs(_crossing(db, peak_bin, level, direction) - (peak_bin + off)))
        except MetrologyError:
            sides.append(None)
    return sides[0], sides[1]


def mainlobe_width_392(profile: RangeProfile, peak_bin: int) -> float:
    """Two-sided mainlobe width (Hz) at 3.92 dB below the peak."""
    db = 20 * np.log10(np.maximum(np.abs(profile.spectrum), _TINY))
    if not 0 <= peak_bin < db.size:
        raise InvalidParameterError(f"peak_bin {peak_bin} out of range")
    left = peak_bin > 0 and db[peak_bin - 1] > db[peak_bin]
    right = peak_bin < db.size - 1 and db[peak_bin + 1] > db[peak_bin]
    if left or right:
        raise MetrologyError(f"bin {peak_bin} is not a local maximum")
    lw, rw = _half_widths(db, peak_bin, MAINLOBE_DB)
    if lw is None or rw is None:
        raise MetrologyError(f"no -{MAINLOBE_DB} dB crossing on both sides of bin {peak_bin}")
    return (lw + rw) * profile.bin_hz


def measured_resolution(width_hz: float, k: float) -> float:
    """Range extent (m) of a beat-frequency width."""
    if not (width_hz > 0 and k > 0):
        raise InvalidParameterError("width and chirp rate must be positive")
    return SPEED_OF_LIGHT * width_hz / (2.0 * k)


def extract_peaks(profile: RangeProfile, min_separation_hz: float,
                  threshold_db: float = -10.0) -> list[Peak]:
    """Local maxima within ``threshold_db`` of the strongest, strongest first.

    Candidates closer than ``min_separation_hz`` to an already accepted,
    stronger peak are dropped. A peak whose lobe merges with a neighbour
    before reaching -3.92 dB on one side gets twice its other half-width;
    if neither side crosses, the width is NaN.
    """
    if not threshold_db < 0:
        raise InvalidParameterError("threshold_db must be negative")
    mag = np.abs(profile.spectrum)
    if mag.max() == 0:
        return []
    db = 20 * np.log10(np.maximum(mag, _TINY) / mag.max())
    inner = np.flatnonzero((db[1:-1] > db[:-2]) & (db[1:-1] >= db[2:])) + 1
    cand = inner[db[inner] >= threshold_db]
    cand = cand[np.argsort(-db[cand], kind="stable")]

    peaks: list[Peak] = []
    for i in cand:
        off, top = _parabolic(db, int(i))
        f = (i + off) * profile.bin_hz
        if any(abs(f - p.frequency) < min_separation_hz for p in peaks):
            continue
        lw, rw = _half_widths(db, int(i), MAINLOBE_DB)
        if lw is not None and rw is not None:
            width = (lw + rw) * profile.bin_hz
        elif lw is not None or rw is not None:
            width = 2 * (lw if lw is not None else rw) * profile.bin_hz
        else:
            width = math.nan
        peaks.append(Peak(float(f), float(beat_to_range(f, profile.k)), min(top, 0.0),
                          float(width), int(i)))
    return peaks


def peak_sidelobe_db(profile: RangeProfile, true_freqs, guard_hz: float) -> float:
    """Highest level (dB re. the maximum) outside ``guard_hz`` of every true tone.

    Used to score spurious lobes: with a low-sidelobe window the natural
    sidelobes sit far below anything a data gap produces.
    """
    db = profile.magnitude_db()
    keep = np.ones(db.size, dtype=bool)
    for f in np.atleast_1d(true_freqs):
        keep &= np.abs(profile.freq_axis - f) > guard_hz
    if not keep.any():
        raise MetrologyError("guard band covers the whole spectrum")
    return float(db[keep].max())


def write_profile_csv(profile: RangeProfile, path, max_range: float | None = None) -> Path:
    """CSV with header ``freq_hz,range_m,mag_db,re,im``, one row per bin."""
    path = Path(path)
    db = profile.magnitude_db()
    sel = slice(None)
    if max_range is not None:
        sel = profile.range_axis <= max_range
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["freq_hz", "range_m", "mag_db", "re", "im"])
        for f, r, m, z in zip(profile.freq_axis[sel], profile.range_axis[sel],
                              db[sel], profile.spectrum[sel]):
            w.writerow([repr(float(f)), repr(float(r)), repr(float(m)),
                        repr(float(z.real)), repr(float(z.imag))])
    return path
