import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fscradar.errors import InvalidParameterError, PlanError
from fscradar.plan import (CONSTRAINTS, SPEED_OF_LIGHT, center_wavelength, equivalent_bandwidth,
                           interference_masked_subpulses, n_max, reference_plan, replace_plan,
                           require_valid, subpulse_carrier, subpulse_span, synthesized_band,
                           theoretical_resolution, validate_plan)

C = 299_792_458.0


def test_speed_of_light_value():
    assert SPEED_OF_LIGHT == C


def test_chirp_rate_and_ratios():
    p = reference_plan()
    assert p.k == 2.2e9 / 3.3e-6
    assert p.k == pytest.approx(6.6667e14, rel=1e-4)
    assert round(p.m_ratio) == 14
    assert p.step_time == pytest.approx(3e-6, rel=1e-12)


@pytest.mark.parametrize("b_obpf, delta_f, expected", [
    (16e9, 2e9, 9),
    (1.999e9, 2e9, 1),
    (34e9, 2e9, 18),
])
def test_n_max_examples(b_obpf, delta_f, expected):
    assert n_max(b_obpf, delta_f) == expected


@pytest.mark.parametrize("args", [(0.0, 2e9), (16e9, 0.0), (-1.0, 2e9), (16e9, -2e9)])
def test_n_max_rejects_non_positive(args):
    with pytest.raises(InvalidParameterError):
        n_max(*args)


def test_subpulse_spans_cover_16p9_to_35p1_ghz():
    p = reference_plan()
    lo0, hi0 = subpulse_span(p, 0)
    lo8, hi8 = subpulse_span(p, 8)
    assert (lo0, hi0) == pytest.approx((16.9e9, 19.1e9), abs=1.0)
    assert (lo8, hi8) == pytest.approx((32.9e9, 35.1e9), abs=1.0)
    assert synthesized_band(p) == pytest.approx((16.9e9, 35.1e9), abs=1.0)


def test_carrier_steps_by_delta_f():
    p = reference_plan()
    carriers = [subpulse_carrier(p, n) for n in range(p.n_sub)]
    assert np.diff(carriers) == pytest.approx(np.full(8, 2e9), abs=1e-3)


def test_degenerate_no_step_plan_keeps_carrier():
    # not a valid plan, but the carrier formula itself is still defined
    p = replace_plan(reference_plan(), delta_f=0.0, f_offset=0.0)
    assert all(subpulse_carrier(p, n) == p.f_c for n in range(p.n_sub))


@pytest.mark.parametrize("n", [-1, 9, 100])
def test_carrier_index_out_of_range(n):
    with pytest.raises(IndexError):
        subpulse_carrier(reference_plan(), n)


@pytest.mark.parametrize("n, expected", [(9, 18.2e9), (3, 6.2e9), (6, 12.2e9), (1, 2.2e9)])
def test_equivalent_bandwidth(n, expected):
    assert equivalent_bandwidth(reference_plan(n)) == pytest.approx(expected, rel=1e-12)


def test_theoretical_resolution_examples():
    assert theoretical_resolution(18.2e9) == pytest.approx(8.236e-3, abs=5e-6)
    assert theoretical_resolution(34.9e9) == pytest.approx(4.3e-3, abs=5e-5)
    assert theoretical_resolution(C / 2) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(InvalidParameterError):
        theoretical_resolution(0.0)


def test_center_wavelength_is_26_ghz():
    assert center_wavelength(reference_plan()) == pytest.approx(C / 26e9, rel=1e-12)


def test_reference_plan_is_valid():
    assert validate_plan(reference_plan()) == []
    assert require_valid(reference_plan()) == reference_plan()


@pytest.mark.parametrize("changes, label", [
    ({"delta_f": 2.3e9, "n_sub": 7}, "Δf < B_chirp"),
    ({"t_pw": 6e-6}, "T_L ≥ T_pw"),
    ({"t_cw": 5.1e-6}, "T_pw ≥ T_cw"),
    ({"t_loop": 5.2e-6}, "T_cr = T_L"),
    ({"t_pr": 71.97e-6}, "T_pr = M·T_cr"),
    ({"t_pr": 8 * 5.14e-6}, "M ≥ N_max"),
    ({"n_sub": 10}, "1 ≤ N ≤ N_max"),
    ({"n_sub": 0}, "1 ≤ N ≤ N_max"),
    ({"b_chirp": -1.0}, "positive"),
    ({"f_offset": -1.0}, "positive"),
    ({"t_cw": math.nan}, "positive"),
])
def test_single_perturbation_gives_matching_violation(changes, label):
    got = validate_plan(replace_plan(reference_plan(), **changes))
    assert [v.constraint for v in got] == [label]
    assert label in CONSTRAINTS


def test_delta_f_above_chirp_bandwidth_is_reported():
    got = {v.constraint for v in validate_plan(replace_plan(reference_plan(), delta_f=2.3e9))}
    assert "Δf < B_chirp" in got


def test_require_valid_raises_with_violations():
    with pytest.raises(PlanError) as info:
        require_valid(replace_plan(reference_plan(), t_pw=6e-6))
    assert [v.constraint for v in info.value.violations] == ["T_L ≥ T_pw"]


def test_divisibility_tolerance():
    p = reference_plan()
    assert validate_plan(replace_plan(p, t_pr=p.t_cr * 14 * (1 + 5e-10))) == []
    assert validate_plan(replace_plan(p, t_pr=p.t_cr * 14 * (1 + 5e-8)))


@pytest.mark.parametrize("band, expected", [
    ((22.9e9, 25.1e9), [3]),
    ((10e9, 16.8e9), []),
    ((16.9e9, 35.1e9), list(range(9))),
    ((35.2e9, 40e9), []),
])
def test_interference_masking(band, expected):
    assert interference_masked_subpulses(reference_plan(), *band) == expected


def test_interference_masking_rejects_empty_band():
    with pytest.raises(InvalidParameterError):
        interference_masked_subpulses(reference_plan(), 25e9, 25e9)


def test_interference_masking_with_spectral_gaps():
    # delta_f > b_chirp leaves a 0.5 GHz hole between spans; the plan need
    # not be valid for the overlap rule itself
    p = replace_plan(reference_plan(), delta_f=2.7e9, b_obpf=30e9)
    lo1, hi1 = subpulse_span(p, 1)
    lo2, _ = subpulse_span(p, 2)
    assert interference_masked_subpulses(p, hi1 + 1e6, lo2 - 1e6) == []
    assert interference_masked_subpulses(p, hi1 - 1e6, lo2 + 1e6) == [1, 2]
    assert interference_masked_subpulses(p, lo1 + 1e8, lo1 + 2e8) == [1]


def test_band_union_masks_every_subpulse():
    for n in range(1, 10):
        p = reference_plan(n)
        lo, hi = synthesized_band(p)
        assert interference_masked_subpulses(p, lo, hi) == list(range(n))


@settings(max_examples=50, deadline=None)
@given(st.floats(1e9, 40e9), st.floats(0.1e9, 5e9))
def test_n_max_formula(b_obpf, delta_f):
    assert n_max(b_obpf, delta_f) == math.floor(b_obpf / delta_f) + 1


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2e9, 2.1e9), st.floats(2.2e9, 4e9))
def test_bandwidth_monotone_in_n(delta_f, b_chirp):
    base = replace_plan(reference_plan(), delta_f=delta_f, b_chirp=b_chirp)
    bw = [equivalent_bandwidth(base.with_n(n)) for n in range(1, 10)]
    res = [theoretical_resolution(b) for b in bw]
    assert all(b2 >= b1 for b1, b2 in zip(bw, bw[1:]))
    assert all(r2 <= r1 for r1, r2 in zip(res, res[1:]))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 9), st.floats(0.0, 1e9))
def test_carrier_difference_is_delta_f(n_sub, f_offset):
    p = replace_plan(reference_plan(n_sub), f_offset=f_offset)
    for n in range(1, n_sub):
        assert subpulse_carrier(p, n) - subpulse_carrier(p, n - 1) == pytest.approx(
            p.delta_f, rel=1e-12)
