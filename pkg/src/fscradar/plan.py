"""
Waveform plan for the frequency-stepped chirp train.

A seed chirp (start frequency ``f_start``, bandwidth ``b_chirp``, width
``t_cw``) is repeated every ``t_cr`` seconds while a recirculating loop
adds ``delta_f`` per pass, so subpulse ``n`` sweeps::

    [f_start + (n + 1) * delta_f + f_offset,
     f_start + (n + 1) * delta_f + f_offset + b_chirp]

``f_offset`` carries the fixed shift applied to every loop output (200 MHz
in the reference hardware). The functions here derive the subpulse
carriers, the synthesized bandwidth, the ideal range resolution and check
the timing constraints of the loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import InvalidParameterError, PlanError

SPEED_OF_LIGHT = 299_792_458.0

#: relative tolerance for ``t_pr == M * t_cr`` and ``t_cr == t_loop``
DIVISIBILITY_RTOL = 1e-9


@dataclass(frozen=True)
class WaveformPlan:
    """Timing and frequency parameters of one frequency-stepped chirp train.

    All quantities are SI (Hz, s). ``n_sub`` is the number of subpulses used
    per train.
    """

    f_start: float
    b_chirp: float
    t_cw: float
    t_cr: float
    t_loop: float
    t_pr: float
    t_pw: float
    delta_f: float
    f_offset: float
    b_obpf: float
    n_sub: int

    @property
    def k(self) -> float:
        """Chirp rate in Hz/s."""
        return self.b_chirp / self.t_cw

    @property
    def f_c(self) -> float:
        """Center frequency of the seed chirp."""
        return self.f_start + 0.5 * self.b_chirp

    @property
    def n_max(self) -> int:
        return n_max(self.b_obpf, self.delta_f)

    @property
    def m_ratio(self) -> float:
        """``t_pr / t_cr``; an integer for a feasible plan."""
        return self.t_pr / self.t_cr

    @property
    def step_time(self) -> float:
        """``delta_f / k``: the time the chirp needs to sweep one step."""
        return self.delta_f / self.k

    def with_n(self, n_sub: int) -> "WaveformPlan":
        return replace_plan(self, n_sub=n_sub)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def replace_plan(plan: WaveformPlan, **changes) -> WaveformPlan:
    data = plan.to_dict()
    data.update(changes)
    return WaveformPlan(**data)


def reference_plan(n_sub: int = 9) -> WaveformPlan:
    """The 16.9-35.1 GHz reference configuration (nine 2.2 GHz subpulses)."""
    return WaveformPlan(
        f_start=14.7e9,
        b_chirp=2.2e9,
        t_cw=3.3e-6,
        t_cr=5.14e-6,
        t_loop=5.14e-6,
        t_pr=71.96e-6,
        t_pw=5e-6,
        delta_f=2e9,
        f_offset=0.2e9,
        b_obpf=16e9,
        n_sub=n_sub,
    )


def n_max(b_obpf: float, delta_f: float) -> int:
    """Largest number of frequency-shifted pulses the loop filter passes."""
    if not (b_obpf > 0 and delta_f > 0):
        raise InvalidParameterError(
            f"b_obpf and delta_f must be positive, got {b_obpf!r}, {delta_f!r}"
        )
    return int(math.floor(b_obpf / delta_f)) + 1


def subpulse_carrier(plan: WaveformPlan, n: int) -> float:
    """Center frequency of subpulse ``n``."""
    if not 0 <= n < plan.n_sub:
        raise IndexError(f"subpulse index {n} outside [0, {plan.n_sub})")
    return plan.f_c + (n + 1) * plan.delta_f + plan.f_offset


def subpulse_start_frequency(plan: WaveformPlan, n: int) -> float:
    """Instantaneous frequency of subpulse ``n`` at the start of its window."""
    return subpulse_carrier(plan, n) - 0.5 * plan.b_chirp


def subpulse_span(plan: WaveformPlan, n: int) -> tuple[float, float]:
    fc = subpulse_carrier(plan, n)
    return fc - 0.5 * plan.b_chirp, fc + 0.5 * plan.b_chirp


def start_frequencies(plan: WaveformPlan) -> np.ndarray:
    n = np.arange(plan.n_sub)
    return plan.f_start + (n + 1) * plan.delta_f + plan.f_offset


def equivalent_bandwidth(plan: WaveformPlan) -> float:
    """Bandwidth of the single chirp the stitched train is equivalent to."""
    return (plan.n_sub - 1) * plan.delta_f + plan.b_chirp


def synthesized_band(plan: WaveformPlan) -> tuple[float, float]:
    lo = subpulse_span(plan, 0)[0]
    return lo, lo + equivalent_bandwidth(plan)


def center_wavelength(plan: WaveformPlan) -> float:
    """Wavelength at the middle of the synthesized band."""
    lo, hi = synthesized_band(plan)
    return SPEED_OF_LIGHT / (0.5 * (lo + hi))


def theoretical_resolution(bandwidth: float) -> float:
    """Range resolution c / 2B."""
    if not bandwidth > 0:
        raise InvalidParameterError(f"bandwidth must be positive, got {bandwidth!r}")
    return SPEED_OF_LIGHT / (2.0 * bandwidth)


@dataclass(frozen=True)
class Violation:
    constraint: str
    detail: str

    def __str__(self) -> str:
        return f"{self.constraint}: {self.detail}"


_POSITIVE = ("f_start", "b_chirp", "t_cw", "t_cr", "t_loop", "t_pr", "t_pw",
             "delta_f", "b_obpf")


#: labels used by :func:`validate_plan`, in the order they are checked
CONSTRAINTS = ("positive", "Δf < B_chirp", "T_pw ≥ T_cw", "T_L ≥ T_pw", "T_cr = T_L",
               "T_pr = M·T_cr", "M ≥ N_max", "1 ≤ N ≤ N_max")


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= DIVISIBILITY_RTOL * max(abs(a), abs(b))


def validate_plan(plan: WaveformPlan) -> list[Violation]:
    """Return every broken constraint; an empty list means the plan is usable."""
    out: list[Violation] = []
    bad_sign = [name for name in _POSITIVE
                if not (math.isfinite(getattr(plan, name)) and getattr(plan, name) > 0)]
    if not (math.isfinite(plan.f_offset) and plan.f_offset >= 0):
        bad_sign.append("f_offset")
    if bad_sign:
        out.append(Violation("positive", "non-positive or non-finite: " + ", ".join(bad_sign)))
        # the remaining checks divide by these quantities
        return out

    if not plan.delta_f < plan.b_chirp:
        out.append(Violation("Δf < B_chirp",
                             f"delta_f={plan.delta_f:g} >= b_chirp={plan.b_chirp:g}"))
    if not plan.t_pw >= plan.t_cw:
        out.append(Violation("T_pw ≥ T_cw", f"t_pw={plan.t_pw:g} < t_cw={plan.t_cw:g}"))
    if not plan.t_loop >= plan.t_pw:
        out.append(Violation("T_L ≥ T_pw", f"t_loop={plan.t_loop:g} < t_pw={plan.t_pw:g}"))
    if not _close(plan.t_cr, plan.t_loop):
        out.append(Violation("T_cr = T_L", f"t_cr={plan.t_cr:g} != t_loop={plan.t_loop:g}"))

    nmax = n_max(plan.b_obpf, plan.delta_f)
    m = plan.t_pr / plan.t_cr
    m_int = round(m)
    if m_int < 1 or not _close(m, m_int):
        out.append(Violation("T_pr = M·T_cr", f"t_pr/t_cr={m:.12g} is not an integer"))
    elif m_int < nmax:
        out.append(Violation("M ≥ N_max", f"M={m_int} < N_max={nmax}"))
    if not 1 <= plan.n_sub <= nmax:
        out.append(Violation("1 ≤ N ≤ N_max", f"N={plan.n_sub}, N_max={nmax}"))
    return out


def require_valid(plan: WaveformPlan) -> WaveformPlan:
    violations = validate_plan(plan)
    if violations:
        raise PlanError(violations)
    return plan


def interference_masked_subpulses(plan: WaveformPlan, band_lo: float,
                                  band_hi: float) -> list[int]:
    """Subpulses whose swept band is hit by the interference band ``[band_lo, band_hi]``.

    Adjacent subpulses share ``b_chirp - delta_f`` of spectrum, and that
    shared strip is also supplied by the neighbour. A subpulse is therefore
    masked only when its overlap with the band is wider than the shared
    strip; with ``delta_f >= b_chirp`` this reduces to any nonzero overlap.
    """
    if not band_lo < band_hi:
        raise InvalidParameterError(f"empty interference band [{band_lo}, {band_hi}]")
    shared = max(plan.b_chirp - plan.delta_f, 0.0)
    # absorbs float noise in GHz-scale sums such as 14.7e9 + 8e9 + 0.2e9
    slack = 1e-9 * plan.b_chirp
    hit = []
    for n in range(plan.n_sub):
        lo, hi = subpulse_span(plan, n)
        if min(hi, band_hi) - max(lo, band_lo) > shared + slack:
            hit.append(n)
    return hit
