"""
Bandwidth synthesis: splice the N de-chirped rows into one long record.

Shifting row ``n`` so that its gate opens at ``n * delta_f / k`` makes it
continue row ``n-1`` seamlessly: both then hold the de-chirp of a single
chirp of bandwidth ``(N-1)*delta_f + b_chirp``. Each row contributes its
leading ``delta_f / k`` seconds (the last row contributes all of it); the
few leading samples of a row that precede the echo are taken from the
overlapping tail of the previous row instead.

When ``delta_f / k`` is not a whole number of samples the rows are
resampled with a boundary-adapted Lagrange interpolator
(:func:`fractional_sample`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dechirp import SubSignalFrame
from .errors import InvalidParameterError
from .plan import WaveformPlan

#: Lagrange stencil length. For beat frequencies below fs/10 the
#: interpolation error is below 1e-8 of the signal amplitude.
LAGRANGE_TAPS = 16
_INTEGER_TOL = 1e-9


@dataclass(frozen=True)
class SyntheticSignal:
    samples: np.ndarray
    sample_rate: float
    plan: WaveformPlan
    segment_boundaries: np.ndarray  # first sample of each of the N segments
    gap_mask: np.ndarray            # True where the sample came from a masked row
    train_index: int = 0

    @property
    def k(self) -> float:
        return self.plan.k

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def gaps(self) -> list[tuple[int, int]]:
        """Contiguous ``[start, stop)`` runs of ``gap_mask``."""
        m = np.concatenate([[False], self.gap_mask, [False]]).astype(np.int8)
        edges = np.flatnonzero(np.diff(m))
        return [(int(a), int(b)) for a, b in zip(edges[::2], edges[1::2])]


def synthetic_length(plan: WaveformPlan, sample_rate: float) -> int:
    return int(round(((plan.n_sub - 1) * plan.step_time + plan.t_cw) * sample_rate))


def lagrange_weights(offsets: np.ndarray, taps: int) -> np.ndarray:
    """Weights of a ``taps``-point Lagrange interpolator.

    ``offsets`` are the target positions relative to the first stencil
    sample, shape ``(P,)``; result has shape ``(P, taps)``.
    """
    nodes = np.arange(taps, dtype=float)
    d = offsets[:, None] - nodes[None, :]                        # (P, taps)
    w = np.empty((offsets.size, taps))
    for j in range(taps):
        others = np.delete(np.arange(taps), j)
        w[:, j] = np.prod(d[:, others], axis=1) / np.prod(nodes[j] - nodes[others])
    return w


def fractional_sample(row: np.ndarray, positions: np.ndarray, lo: int = 0,
                      hi: int | None = None, taps: int = LAGRANGE_TAPS) -> np.ndarray:
    """Evaluate ``row`` at fractional sample ``positions``.

    Only samples ``lo..hi`` (inclusive) are used; stencils are centered on
    each position where possible and slide inward near the ends. Integer
    positions return the stored sample exactly.
    """
    row = np.asarray(row)
    positions = np.asarray(positions, dtype=float)
    hi = row.size - 1 if hi is None else hi
    out = np.zeros(positions.shape, dtype=row.dtype)
    if hi < lo or positions.size == 0:
        return out
    nearest = np.rint(positions)
    exact = np.abs(positions - nearest) <= _INTEGER_TOL
    exact_in = exact & (nearest >= lo) & (nearest <= hi)
    out[exact_in] = row[nearest[exact_in].astype(int)]
    todo = ~exact
    if not todo.any():
        return out
    taps = min(taps, hi - lo + 1)
    p = positions[todo]
    start = np.clip(np.floor(p).astype(int) - taps // 2 + 1, lo, hi - taps + 1)
    w = lagrange_weights(p - start, taps)
    idx = start[:, None] + np.arange(taps)[None, :]
    out[todo] = np.sum(w * row[idx], axis=1)
    return out


def _row_start(frame: SubSignalFrame, n: int) -> int:
    return int(frame.first_valid[n])


def stitch(frame: SubSignalFrame, plan: WaveformPlan | None = None) -> SyntheticSignal:
    """Combine the rows of ``frame`` into one wideband-equivalent de-chirped record."""
    plan = plan or frame.plan
    N, L = frame.sub_signals.shape
    if N != plan.n_sub:
        raise InvalidParameterError(f"frame has {N} rows but plan uses {plan.n_sub} subpulses")
    fs = frame.sample_rate
    if L != int(round(plan.t_cw * fs)):
        raise InvalidParameterError("frame row length does not match plan.t_cw * sample_rate")
    step = plan.step_time * fs  # samples per segment, may be fractional
    if step > L + _INTEGER_TOL:
        raise InvalidParameterError("delta_f / k exceeds the chirp width; rows cannot overlap")

    total = synthetic_length(plan, fs)
    j = np.arange(total)
    seg = np.minimum(np.floor(j / step + _INTEGER_TOL).astype(int), N - 1)
    pos = j - seg * step
    # leading pre-echo samples come from the previous row, shifted one step
    borrow = (seg > 0) & (pos < frame.first_valid[seg] - _INTEGER_TOL)
    src = np.where(borrow, seg - 1, seg)
    pos = np.where(borrow, pos + step, pos)

    out = np.zeros(total)
    for n in range(N):
        sel = src == n
        if not sel.any() or not frame.valid_mask[n]:
            continue
        out[sel] = fractional_sample(frame.sub_signals[n], pos[sel], _row_start(frame, n), L - 1)
    # before the first echo and past the end of the final row there is no data
    out[(pos < frame.first_valid[src] - _INTEGER_TOL) | (pos > L - 0.5)] = 0.0

    gap = ~frame.valid_mask[src]
    bounds = np.ceil(np.arange(N) * step - _INTEGER_TOL).astype(int)
    return SyntheticSignal(out, fs, plan, bounds, gap, frame.train_index)


def coherence_residual(frame: SubSignalFrame, plan: WaveformPlan | None, n: int,
                       statistic: str = "max") -> float:
    """Mismatch between row ``n`` shifted by one step and row ``n-1``.

    Compared over the samples where both rows hold the full echo. The
    result is normalized by the amplitude of row ``n-1`` (``sqrt(2)`` times
    its RMS over the comparison window, which equals the peak for a single
    tone). ``statistic`` is ``"max"`` (largest absolute difference) or
    ``"rms"``.
    """
    plan = plan or frame.plan
    N, L = frame.sub_signals.shape
    if not 1 <= n < N:
        raise InvalidParameterError(f"row index {n} outside [1, {N})")
    for r in (n - 1, n):
        if not frame.valid_mask[r]:
            raise InvalidParameterError(f"row {r} is masked")
    step = plan.step_time * frame.sample_rate
    lo = max(_row_start(frame, n - 1), int(np.ceil(step + _row_start(frame, n) - _INTEGER_TOL)))
    i = np.arange(lo, L)
    if i.size == 0:
        raise InvalidParameterError("rows do not overlap")
    ref = frame.sub_signals[n - 1, i]
    shifted = fractional_sample(frame.sub_signals[n], i - step, _row_start(frame, n), L - 1)
    amp = np.sqrt(2.0 * np.mean(ref * ref))
    if amp == 0:
        raise InvalidParameterError(f"row {n - 1} is zero over the overlap")
    diff = np.abs(shifted - ref)
    if statistic == "max":
        return float(diff.max() / amp)
    if statistic == "rms":
        return float(np.sqrt(np.mean(diff * diff)) / amp)
    raise InvalidParameterError(f"unknown statistic {statistic!r}")
