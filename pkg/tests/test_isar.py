import math

import numpy as np
import pytest

from fscradar.errors import InvalidParameterError
from fscradar.isar import (aperture_angle, collect_trains, crop_image, cross_range_resolution,
                           form_image, image_correlation, image_energy, profile_stack, read_pgm,
                           trains_for_dwell, write_pgm)
from fscradar.plan import center_wavelength, reference_plan
from fscradar.profile import make_window, range_profile
from fscradar.scene import Scatterer, Scene, rotated_positions

C = 299_792_458.0
PLAN = reference_plan()
LAM = C / 26e9
GATE = (1.4, 1.6)


def turntable(*points, omega=2 * math.pi):
    return Scene(tuple(Scatterer(*p) for p in points), center_range=1.5, omega=omega)


def image_of(scene, n_trains, zp=1, window="rect", slow="rect"):
    sigs = collect_trains(PLAN, scene, n_trains)
    profs = profile_stack(sigs, window, range_gate=GATE)
    return form_image(profs, LAM, aperture_angle(scene, PLAN, n_trains), slow, zp)


def test_cross_range_resolution_examples():
    assert cross_range_resolution(LAM, math.radians(39.6)) == pytest.approx(8.34e-3, abs=5e-6)
    assert cross_range_resolution(1.0, math.pi / 2) == pytest.approx(1 / math.pi, rel=1e-12)
    assert cross_range_resolution(LAM, 0.1) == pytest.approx(2 * cross_range_resolution(LAM, 0.2))
    for bad in ((0.0, 0.1), (LAM, 0.0), (LAM, math.pi)):
        with pytest.raises(InvalidParameterError):
            cross_range_resolution(*bad)


def test_center_wavelength():
    assert center_wavelength(PLAN) == pytest.approx(LAM, rel=1e-12)
    assert LAM == pytest.approx(11.53e-3, abs=5e-6)


def test_reference_dwell():
    n = trains_for_dwell(PLAN, 0.11)
    assert n == 1528
    sc = turntable((0, 0))
    assert math.degrees(aperture_angle(sc, PLAN, n)) == pytest.approx(39.6, abs=0.05)


def test_still_scene_gives_identical_trains():
    sigs = collect_trains(PLAN, turntable((0.01, 0.02), omega=0.0), 4)
    assert all(np.array_equal(s.samples, sigs[0].samples) for s in sigs[1:])
    assert [s.train_index for s in sigs] == [0, 1, 2, 3]


def test_doppler_phase_rate():
    x = 0.02
    sc = turntable((x, 0.0))
    sigs = collect_trains(PLAN, sc, 11)
    p0, p10 = range_profile(sigs[0]), range_profile(sigs[10])
    i = int(np.argmax(np.abs(p0.spectrum)))
    dphi = np.angle(p10.spectrum[i] / p0.spectrum[i])
    # range falls by x * omega * t, so the phase advances at -4 pi x omega / lambda
    want = -4 * math.pi * x * sc.omega * 10 * PLAN.t_pr / LAM
    assert dphi == pytest.approx(want, rel=0.02)


def test_threads_do_not_change_results():
    sc = turntable((0.01, 0.02), (-0.02, 0.0))
    a = collect_trains(PLAN, sc, 70, threads=1)
    b = collect_trains(PLAN, sc, 70, threads=3)
    assert all(np.array_equal(u.samples, v.samples) for u, v in zip(a, b))


def test_collect_needs_two_trains():
    with pytest.raises(InvalidParameterError):
        collect_trains(PLAN, turntable((0, 0)), 1)


def test_center_scatterer_images_at_center():
    img = image_of(turntable((0.0, 0.0)), 64)
    r, x = img.peak()
    assert abs(r - 1.5) <= img.range_axis[1] - img.range_axis[0]
    assert x == 0.0


def test_off_center_point_lands_on_mid_aperture_position():
    n = 193  # 5 degrees
    sc = turntable((0.03, 0.012))
    img = image_of(sc, n, zp=4)
    xm, ym = rotated_positions(sc, 0.5 * (n - 1) * PLAN.t_pr)[0]
    r, x = img.peak()
    assert abs(r - (1.5 + ym)) <= img.range_axis[1] - img.range_axis[0]
    assert abs(x - xm) <= img.crossrange_axis[1] - img.crossrange_axis[0]


def test_rotating_scene_rotates_image():
    n = 97
    phi = math.pi / 2
    p = np.array([0.04, 0.01])
    q = np.array([p[0] * math.cos(phi) - p[1] * math.sin(phi),
                  p[0] * math.sin(phi) + p[1] * math.cos(phi)])
    a = image_of(turntable(tuple(p)), n, zp=4)
    b = image_of(turntable(tuple(q)), n, zp=4)
    ra, xa = a.peak()
    rb, xb = b.peak()
    ya, yb = ra - 1.5, rb - 1.5
    want = (xa * math.cos(phi) - ya * math.sin(phi), xa * math.sin(phi) + ya * math.cos(phi))
    # a quarter turn swaps the axes, so each coordinate carries one pixel of both grids
    dr = a.range_axis[1] - a.range_axis[0]
    dx = a.crossrange_axis[1] - a.crossrange_axis[0]
    assert abs(xb - want[0]) <= dx + dr
    assert abs(yb - want[1]) <= dx + dr


@pytest.mark.parametrize("zp, slow", [(1, "rect"), (4, "hann")])
def test_image_energy_parseval(zp, slow):
    sc = turntable((0.02, 0.01), (-0.01, -0.02))
    sigs = collect_trains(PLAN, sc, 40)
    profs = profile_stack(sigs, "hann", range_gate=GATE)
    img = form_image(profs, LAM, aperture_angle(sc, PLAN, 40), slow, zp)
    w = make_window(slow, 40)
    stack = np.stack([p.spectrum for p in profs]) * w[:, None]
    assert image_energy(img) == pytest.approx(float(np.sum(np.abs(stack) ** 2)), rel=1e-9)


def test_axes_spacing_and_monotonic():
    sc = turntable((0.0, 0.0))
    img = image_of(sc, 50, zp=3)
    dx = np.diff(img.crossrange_axis)
    assert np.all(dx > 0) and np.all(np.diff(img.range_axis) > 0)
    want = cross_range_resolution(LAM, aperture_angle(sc, PLAN, 50)) / 3
    assert np.allclose(dx, want, rtol=1e-9)
    assert img.pixels.shape == (img.range_axis.size, img.crossrange_axis.size)


def test_profile_stack_matches_single_profiles():
    sigs = collect_trains(PLAN, turntable((0.01, 0.0)), 3)
    stack = profile_stack(sigs, "hann")
    for s, p in zip(sigs, stack):
        assert np.allclose(p.spectrum, range_profile(s, "hann").spectrum, rtol=1e-12, atol=1e-9)


def test_form_image_errors():
    sigs = collect_trains(PLAN, turntable((0.0, 0.0)), 2)
    profs = profile_stack(sigs)
    with pytest.raises(InvalidParameterError):
        form_image(profs[:1], LAM, 0.01)
    short = profile_stack(sigs, range_gate=GATE)
    with pytest.raises(InvalidParameterError):
        form_image([profs[0], short[1]], LAM, 0.01)
    with pytest.raises(InvalidParameterError):
        profile_stack(sigs, range_gate=(50.0, 60.0))


def test_correlation_and_crop():
    img = image_of(turntable((0.02, 0.0)), 64, slow="hann")
    assert image_correlation(img, img) == pytest.approx(1.0)
    small = crop_image(img, 0.05)
    assert np.all(np.abs(small.crossrange_axis) <= 0.05)
    with pytest.raises(InvalidParameterError):
        image_correlation(img, small)


def test_pgm_round_trip(tmp_path):
    img = image_of(turntable((0.02, 0.0)), 32, slow="hann")
    path = write_pgm(img, tmp_path / "a.pgm", 40.0)
    raw = path.read_bytes()
    h, w = img.pixels.shape
    assert raw.startswith(f"P5\n{w} {h}\n65535\n".encode())
    data = read_pgm(path)
    assert data.shape == (h, w) and data.max() == 65535
    db = img.magnitude_db(-40.0)
    assert np.allclose(data / 65535 * 40 - 40, db, atol=40 / 65535)
