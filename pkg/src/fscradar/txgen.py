"""Full-rate generation of the frequency-stepped chirp transmit waveform."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .plan import WaveformPlan, require_valid, start_frequencies


@dataclass(frozen=True)
class SampledWaveform:
    samples: np.ndarray
    sample_rate: float
    t0: float = 0.0

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.samples.size) / self.sample_rate


@dataclass(frozen=True)
class Spectrogram:
    magnitude: np.ndarray  # (frames, bins)
    times: np.ndarray      # frame centers, s
    freqs: np.ndarray      # Hz


def max_frequency(plan: WaveformPlan) -> float:
    return plan.f_c + plan.n_sub * plan.delta_f + plan.f_offset + 0.5 * plan.b_chirp


def generate_transmit(plan: WaveformPlan, sample_rate: float, n_trains: int = 1, *,
                      delay: float = 0.0) -> SampledWaveform:
    """Sample ``n_trains`` trains of the stepped chirp at ``sample_rate``.

    Subpulse ``n`` of train ``m`` is a unit-amplitude real chirp gated to
    ``[m*t_pr + n*t_cr, m*t_pr + n*t_cr + t_cw)`` whose phase restarts at the
    gate opening. ``delay`` shifts the whole waveform later in time, which
    is how an ideal point echo is produced.
    """
    require_valid(plan)
    if n_trains < 1:
        raise InvalidParameterError(f"n_trains must be >= 1, got {n_trains}")
    f_top = max_frequency(plan)
    if not sample_rate > 2 * f_top:
        raise InvalidParameterError(
            f"sample_rate {sample_rate:g} violates Nyquist for {f_top:g} Hz content")

    n_total = int(round(n_trains * plan.t_pr * sample_rate))
    out = np.zeros(n_total)
    f0 = start_frequencies(plan)
    for m in range(n_trains):
        for n in range(plan.n_sub):
            t_open = m * plan.t_pr + n * plan.t_cr + delay
            i0 = max(int(np.ceil(t_open * sample_rate - 1e-9)), 0)
            i1 = min(int(np.ceil((t_open + plan.t_cw) * sample_rate - 1e-9)), n_total)
            if i1 <= i0:
                continue
            u = np.arange(i0, i1) / sample_rate - t_open
            out[i0:i1] = np.cos(2 * np.pi * (f0[n] * u + 0.5 * plan.k * u * u))
    return SampledWaveform(out, sample_rate, 0.0)


def spectrogram(w: SampledWaveform, window_len: int, hop: int) -> Spectrogram:
    """Hann-windowed magnitude STFT with frame-center times and bin frequencies."""
    x = np.asarray(w.samples, dtype=float)
    if not 2 <= window_len <= x.size:
        raise InvalidParameterError(f"window_len {window_len} not in [2, {x.size}]")
    if hop < 1:
        raise InvalidParameterError(f"hop must be >= 1, got {hop}")
    frames = np.lib.stride_tricks.sliding_window_view(x, window_len)[::hop]
    win = np.hanning(window_len)
    mag = np.abs(np.fft.rfft(frames * win, axis=1))
    times = w.t0 + (np.arange(frames.shape[0]) * hop + 0.5 * (window_len - 1)) / w.sample_rate
    freqs = np.fft.rfftfreq(window_len, 1.0 / w.sample_rate)
    return Spectrogram(mag, times, freqs)


def ridge(spec: Spectrogram, floor_db: float = -20.0) -> tuple[np.ndarray, np.ndarray]:
    """Peak frequency of every frame whose peak is within ``floor_db`` of the loudest."""
    peak = spec.magnitude.max(axis=1)
    keep = peak > spec.magnitude.max() * 10 ** (floor_db / 20)
    return spec.times[keep], spec.freqs[np.argmax(spec.magnitude[keep], axis=1)]
