"""
Point-scatterer scenes on a turntable.

Coordinates are in meters relative to the rotation center: ``x`` is
cross-range, ``y`` is down-range (away from the radar). The turntable
rotates at ``omega`` rad/s, and the range to a scatterer is taken to first
order (projection onto the line of sight)::

    R(t) = center_range + y * cos(omega * t) - x * sin(omega * t)

which is the usual small-target ISAR model. Delays are round trip,
``tau = 2 * R / c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidParameterError
from .plan import SPEED_OF_LIGHT, WaveformPlan, interference_masked_subpulses


@dataclass(frozen=True)
class Scatterer:
    x: float
    y: float
    reflectivity: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidParameterError(f"scatterer coordinates must be finite: {self}")
        if not (math.isfinite(self.reflectivity) and self.reflectivity >= 0):
            raise InvalidParameterError(f"reflectivity must be >= 0: {self}")


@dataclass(frozen=True)
class Scene:
    """Targets, geometry and channel impairments.

    ``snr_db`` is the per-sample amplitude SNR of a unit-reflectivity echo
    at the de-chirped output: noise is white Gaussian with standard
    deviation ``10 ** (-snr_db / 20)``. ``None`` disables noise.
    """

    scatterers: tuple[Scatterer, ...]
    center_range: float = 1.5
    omega: float = 0.0
    snr_db: Optional[float] = None
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "scatterers", tuple(self.scatterers))
        if not (math.isfinite(self.center_range) and self.center_range > 0):
            raise InvalidParameterError(f"center_range must be > 0, got {self.center_range}")
        if not math.isfinite(self.omega):
            raise InvalidParameterError(f"omega must be finite, got {self.omega}")

    @property
    def noise_std(self) -> float:
        if self.snr_db is None or self.snr_db == math.inf:
            return 0.0
        return 10.0 ** (-self.snr_db / 20.0)

    def positions(self) -> np.ndarray:
        """(S, 2) array of (x, y) at t = 0."""
        return np.array([(s.x, s.y) for s in self.scatterers], dtype=float).reshape(-1, 2)

    def reflectivities(self) -> np.ndarray:
        return np.array([s.reflectivity for s in self.scatterers], dtype=float)


@dataclass(frozen=True)
class GapSpec:
    """Interference description: a frequency band or explicit subpulse indices."""

    band_lo: Optional[float] = None
    band_hi: Optional[float] = None
    indices: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.indices is not None:
            object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
            return
        if self.band_lo is None or self.band_hi is None:
            raise InvalidParameterError("GapSpec needs either indices or band_lo/band_hi")
        if not self.band_lo < self.band_hi:
            raise InvalidParameterError(
                f"band_lo must be < band_hi, got {self.band_lo}, {self.band_hi}")

    def resolve(self, plan: WaveformPlan) -> list[int]:
        if self.indices is not None:
            bad = [i for i in self.indices if not 0 <= i < plan.n_sub]
            if bad:
                raise InvalidParameterError(f"gap indices out of range: {bad}")
            return sorted(set(self.indices))
        return interference_masked_subpulses(plan, self.band_lo, self.band_hi)


def rotated_positions(scene: Scene, t) -> np.ndarray:
    """Scatterer coordinates after rotating the turntable for ``t`` seconds.

    ``t`` may be an array; the result has shape ``t.shape + (S, 2)``.
    """
    theta = scene.omega * np.asarray(t, dtype=float)[..., None]
    c, s = np.cos(theta), np.sin(theta)
    pos = scene.positions()
    x, y = pos[:, 0], pos[:, 1]
    # sign chosen so that the down-range component is y*cos - x*sin
    xr = x * c + y * s
    yr = y * c - x * s
    return np.stack([xr, yr], axis=-1)


def delays(scene: Scene, t) -> np.ndarray:
    """Round-trip delays of every scatterer at time(s) ``t``; shape ``t.shape + (S,)``."""
    y_rot = rotated_positions(scene, t)[..., 1]
    return 2.0 * (scene.center_range + y_rot) / SPEED_OF_LIGHT


def scatterer_delay(scene: Scene, s: Scatterer, t: float) -> float:
    """Round-trip delay of one scatterer at time ``t``."""
    if t < 0:
        raise InvalidParameterError(f"t must be >= 0, got {t}")
    theta = scene.omega * t
    r = scene.center_range + s.y * math.cos(theta) - s.x * math.sin(theta)
    return 2.0 * r / SPEED_OF_LIGHT


def make_two_target_scene(separation: float, center_range: float = 1.5,
                          snr_db: Optional[float] = None, rng_seed: int = 0) -> Scene:
    """Two unit scatterers ``separation`` apart in range, on a still turntable."""
    if not separation > 0:
        raise InvalidParameterError(f"separation must be > 0, got {separation}")
    half = 0.5 * separation
    return Scene((Scatterer(0.0, -half), Scatterer(0.0, half)),
                 center_range=center_range, omega=0.0, snr_db=snr_db, rng_seed=rng_seed)


def v_points(side: float, angle_deg: float, spacing: float,
             tilt_deg: float = 0.0) -> np.ndarray:
    """Sample a "V" of two ``side``-long arms opening by ``angle_deg``.

    Each arm gets ``ceil(side / spacing)`` points beyond the shared vertex.
    The V opens toward +y (away from the radar) before ``tilt_deg`` is
    applied, and the point cloud is shifted so its centroid is the origin.
    """
    if not side > 0:
        raise InvalidParameterError(f"side must be > 0, got {side}")
    if not 0 < angle_deg <= 180:
        raise InvalidParameterError(f"angle must be in (0, 180], got {angle_deg}")
    if not 0 < spacing <= side:
        raise InvalidParameterError(f"spacing must be in (0, side], got {spacing}")
    per_arm = math.ceil(side / spacing - 1e-12)
    dist = np.linspace(0.0, side, per_arm + 1)[1:]
    half = math.radians(angle_deg) / 2
    tilt = math.radians(tilt_deg)
    pts = [np.zeros((1, 2))]
    for sign in (-1.0, 1.0):
        heading = math.pi / 2 + sign * half + tilt
        pts.append(np.column_stack([dist * math.cos(heading), dist * math.sin(heading)]))
    cloud = np.vstack(pts)
    return cloud - cloud.mean(axis=0)


def make_v_scene(side: float, angle: float, spacing: float, *, tilt: float = 0.0,
                 center_range: float = 1.5, omega: float = 2 * math.pi,
                 snr_db: Optional[float] = None, rng_seed: int = 0) -> Scene:
    """Rotating "V" target (angles in degrees; default 360 deg/s turntable)."""
    pts = v_points(side, angle, spacing, tilt)
    return Scene(tuple(Scatterer(float(x), float(y)) for x, y in pts),
                 center_range=center_range, omega=omega, snr_db=snr_db, rng_seed=rng_seed)


def scene_from_points(points: Sequence[Sequence[float]], **kwargs) -> Scene:
    """Build a scene from ``(x, y)`` or ``(x, y, reflectivity)`` rows."""
    scat = tuple(Scatterer(*map(float, p)) for p in points)
    return Scene(scat, **kwargs)


def noise_rng(scene: Scene, train_index: int) -> np.random.Generator:
    """Independent, reproducible noise stream for one train."""
    seq = np.random.SeedSequence(entropy=scene.rng_seed, spawn_key=(int(train_index),))
    return np.random.default_rng(seq)
