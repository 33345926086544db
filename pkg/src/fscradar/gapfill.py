"""
Auto-regressive reconstruction of masked stretches of a synthetic record.

Each gap is bridged from both sides: an AR model fitted (Burg) to the
samples left of the gap is run forward across it, a model fitted to the
time-reversed samples right of the gap is run backward, and the two
predictions are blended with a linear crossfade.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import lfilter, lfiltic

from .errors import InvalidParameterError, ReconstructionError
from .synth import SyntheticSignal

log = logging.getLogger(__name__)

MAX_DEFAULT_ORDER = 64


@dataclass(frozen=True)
class ARModel:
    """Prediction form ``x[t] = sum_i coefficients[i-1] * x[t-i]``."""

    order: int
    coefficients: np.ndarray
    fit_error: float
    reflection: np.ndarray


def fit_ar(data, order: int) -> ARModel:
    """Burg estimate of an AR(``order``) model.

    Each stage picks the reflection coefficient that minimizes the summed
    forward and backward prediction error power, so ``|kappa| <= 1`` and
    the resulting predictor is minimum phase.
    """
    x = np.asarray(data)
    if order < 1:
        raise InvalidParameterError(f"order must be >= 1, got {order}")
    if x.size <= 2 * order:
        raise InvalidParameterError(
            f"need more than {2 * order} samples for order {order}, got {x.size}")
    cplx = np.iscomplexobj(x)
    x = x.astype(complex if cplx else float)
    power = float(np.mean(np.abs(x) ** 2))
    if power == 0:
        raise ReconstructionError("cannot fit an AR model to all-zero data")

    ef = x.copy()
    eb = x.copy()
    a = np.ones(1, dtype=x.dtype)
    kappas = np.zeros(order, dtype=x.dtype)
    err = power
    for m in range(order):
        f = ef[1:]
        b = eb[:-1]
        den = np.vdot(f, f).real + np.vdot(b, b).real
        kappa = -2.0 * np.vdot(b, f) / den if den > 0 else 0.0
        if not cplx:
            kappa = float(np.real(kappa))
        ef, eb = f + kappa * b, b + np.conj(kappa) * f
        a = np.concatenate([a, [0]])
        a = a + kappa * np.conj(a[::-1])
        kappas[m] = kappa
        err *= 1.0 - abs(kappa) ** 2
    return ARModel(order, -a[1:], max(float(err), 0.0), kappas)


def predict_forward(model: ARModel, history: np.ndarray, steps: int) -> np.ndarray:
    """Continue ``history`` by ``steps`` samples with the AR recursion."""
    p = model.order
    if history.size < p:
        raise InvalidParameterError("history shorter than the model order")
    # all-pole filter driven by zeros, primed with the last p samples
    den = np.concatenate([[1.0], -model.coefficients])
    zi = lfiltic([1.0], den, np.asarray(history[-p:])[::-1])
    out, _ = lfilter([1.0], den, np.zeros(steps, dtype=den.dtype), zi=zi)
    return out


def default_order(flank_length: int) -> int:
    return max(1, min(flank_length // 3, MAX_DEFAULT_ORDER))


def bridge_gap(left: np.ndarray, right: np.ndarray, length: int,
               order: int | None = None) -> np.ndarray:
    """Reconstruct ``length`` samples between ``left`` and ``right`` flanks."""
    if length == 0:
        return np.zeros(0, dtype=left.dtype)
    p = order or default_order(min(left.size, right.size))
    for name, flank in (("left", left), ("right", right)):
        if flank.size < 2 * p + 1:
            raise ReconstructionError(
                f"{name} flank has {flank.size} samples, order {p} needs at least {2 * p + 1}")
    fwd = predict_forward(fit_ar(left, p), left, length)
    rev = right[::-1]
    bwd = predict_forward(fit_ar(rev, p), rev, length)[::-1]
    # weight of the forward prediction falls 1 -> 0 across the gap
    w = (length - np.arange(length)) / (length + 1.0)
    return w * fwd + (1.0 - w) * bwd


def fill_gap(sig: SyntheticSignal, order: int | None = None) -> SyntheticSignal:
    """Fill every gap of ``sig`` and clear its ``gap_mask``.

    Flanks extend from the gap to the neighbouring gap (or the record
    end). Samples before the first echo sample are not part of a flank.
    """
    gaps = sig.gaps()
    if not gaps:
        return sig
    x = sig.samples
    if sig.gap_mask.all():
        raise ReconstructionError("every sample is masked; nothing to fit")
    nz = np.flatnonzero((x != 0) & ~sig.gap_mask)
    first, last = (int(nz[0]), int(nz[-1]) + 1) if nz.size else (0, x.size)

    out = x.copy()
    bounds = [first] + [b for g in gaps for b in g] + [last]
    for gi, (g0, g1) in enumerate(gaps):
        lo = bounds[2 * gi]
        hi = bounds[2 * gi + 3]
        left, right = x[lo:g0], x[g1:hi]
        p = order or default_order(min(left.size, right.size))
        if left.size < 2 * p + 1 or right.size < 2 * p + 1:
            raise ReconstructionError(
                f"gap [{g0}, {g1}) has flanks of {left.size} and {right.size} samples; "
                f"order {p} needs at least {2 * p + 1} on each side")
        out[g0:g1] = bridge_gap(left, right, g1 - g0, p)
        log.debug("filled gap [%d, %d) with order %d", g0, g1, p)
    return replace(sig, samples=out, gap_mask=np.zeros_like(sig.gap_mask))
