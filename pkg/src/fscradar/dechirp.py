"""
Analytic de-chirp receiver.

For a point echo with round-trip delay ``tau`` and subpulse ``n`` that
starts sweeping at ``f_n``, mixing with the reference chirp leaves::

    s_n(u) = cos(2*pi*(k*tau*u - k*tau**2/2 + f_n*tau)),   tau <= u < t_cw

where ``u`` is the time since the subpulse gate opened. Rows are sampled on
that local grid, ``u_i = i / sample_rate``, with ``round(t_cw*sample_rate)``
samples per row. Samples before the echo arrives are zero.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidParameterError
from .plan import WaveformPlan, require_valid, start_frequencies
from .scene import GapSpec, Scene, delays, noise_rng

log = logging.getLogger(__name__)

#: samples per computation block when many trains are synthesized at once
_BLOCK_ELEMENTS = 4_000_000


@dataclass(frozen=True)
class SubSignalFrame:
    """The N de-chirped rows of one train.

    ``first_valid[n]`` is the first sample of row ``n`` at which every echo
    has arrived; earlier samples hold only partial (or no) returns.
    """

    sub_signals: np.ndarray  # (N, L)
    sample_rate: float
    train_index: int
    valid_mask: np.ndarray   # (N,) bool
    first_valid: np.ndarray  # (N,) int
    plan: WaveformPlan

    @property
    def n_rows(self) -> int:
        return self.sub_signals.shape[0]

    @property
    def row_length(self) -> int:
        return self.sub_signals.shape[1]


def row_length(plan: WaveformPlan, sample_rate: float) -> int:
    return int(round(plan.t_cw * sample_rate))


def subpulse_start_times(plan: WaveformPlan, train_indices) -> np.ndarray:
    """Gate-opening times, shape ``(len(train_indices), N)``."""
    m = np.asarray(train_indices, dtype=float)[:, None]
    n = np.arange(plan.n_sub)[None, :]
    return m * plan.t_pr + n * plan.t_cr


def _check_alias(plan: WaveformPlan, tau: np.ndarray, sample_rate: float) -> None:
    beat = plan.k * tau
    worst = np.unravel_index(np.argmax(beat), beat.shape)
    if beat[worst] >= 0.5 * sample_rate:
        raise InvalidParameterError(
            f"scatterer {worst[-1]} beats at {beat[worst]:.6g} Hz, above Nyquist "
            f"{0.5 * sample_rate:.6g} Hz (delay {tau[worst]:.6g} s)")
    if tau.min() < 0 or tau.max() >= plan.t_cw:
        raise InvalidParameterError("echo delay outside the chirp window [0, t_cw)")


def _rows(plan: WaveformPlan, scene: Scene, train_indices, sample_rate: float) -> tuple[np.ndarray, np.ndarray]:
    """Noiseless rows for several trains: (T, N, L) samples and (T, N) first-valid index."""
    t_start = subpulse_start_times(plan, train_indices)   # (T, N)
    tau = delays(scene, t_start)                          # (T, N, S) stop-and-hop
    _check_alias(plan, tau, sample_rate)
    amp = scene.reflectivities()
    f0 = start_frequencies(plan)[None, :, None]
    k = plan.k
    L = row_length(plan, sample_rate)
    u = np.arange(L) / sample_rate

    # per-scatterer phase offset and beat frequency; the u-dependent part is a
    # single multiply inside the loop so the block stays cache friendly
    phase0 = 2 * np.pi * (f0 * tau - 0.5 * k * tau * tau)  # (T, N, S)
    omega_b = 2 * np.pi * k * tau                          # (T, N, S)
    T, N, S = tau.shape
    out = np.zeros((T, N, L))
    for s in range(S):
        if amp[s] == 0:
            continue
        arg = omega_b[:, :, s, None] * u + phase0[:, :, s, None]
        contrib = amp[s] * np.cos(arg)
        contrib[u[None, None, :] < tau[:, :, s, None]] = 0.0
        out += contrib
    first_valid = np.ceil(tau.max(axis=2) * sample_rate - 1e-9).astype(int)
    # ceil can land one short when tau*fs is within rounding of an integer
    first_valid = np.where(first_valid / sample_rate < tau.max(axis=2), first_valid + 1, first_valid)
    return out, np.minimum(first_valid, L)


def dechirp_block(plan: WaveformPlan, scene: Scene, train_indices, sample_rate: float) -> list[SubSignalFrame]:
    """De-chirp several trains at once; returns one frame per train index."""
    require_valid(plan)
    if not scene.scatterers:
        raise InvalidParameterError("scene has no scatterers")
    idx = [int(m) for m in train_indices]
    L = row_length(plan, sample_rate)
    per_train = plan.n_sub * L * len(scene.scatterers)
    step = max(1, _BLOCK_ELEMENTS // max(per_train, 1))
    frames = []
    for lo in range(0, len(idx), step):
        chunk = idx[lo:lo + step]
        rows, first = _rows(plan, scene, chunk, sample_rate)
        for j, m in enumerate(chunk):
            data = rows[j]
            if scene.noise_std > 0:
                data = data + scene.noise_std * noise_rng(scene, m).standard_normal(data.shape)
            frames.append(SubSignalFrame(data, float(sample_rate), m,
                                         np.ones(plan.n_sub, dtype=bool), first[j], plan))
    return frames


def dechirp_frame(plan: WaveformPlan, scene: Scene, train_index: int = 0,
                  sample_rate: float = 100e6) -> SubSignalFrame:
    """De-chirped rows of train ``train_index`` for every scatterer in ``scene``."""
    return dechirp_block(plan, scene, [train_index], sample_rate)[0]


def apply_gap(frame: SubSignalFrame, gap: GapSpec, plan: WaveformPlan | None = None) -> SubSignalFrame:
    """Zero the rows hit by interference and clear their ``valid_mask`` entries."""
    plan = plan or frame.plan
    idx = gap.resolve(plan)
    if not idx:
        if gap.indices is None:
            warnings.warn(f"interference band [{gap.band_lo:g}, {gap.band_hi:g}] Hz "
                          "misses every subpulse; frame unchanged", stacklevel=2)
        return frame
    data = frame.sub_signals.copy()
    data[idx] = 0.0
    mask = frame.valid_mask.copy()
    mask[idx] = False
    log.debug("train %d: masked subpulses %s", frame.train_index, idx)
    return replace(frame, sub_signals=data, valid_mask=mask)
