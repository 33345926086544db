"""
Simulator for a frequency-stepped chirp radar with de-chirp reception.

The pipeline is ``plan`` (waveform parameters and feasibility) ->
``scene`` (point scatterers on a turntable) -> ``dechirp`` (per-subpulse
beat signals) -> ``synth`` (bandwidth synthesis) -> ``profile`` (range
profiles and resolution metrology), with ``gapfill`` for interference
gaps and ``isar`` for range-Doppler imaging. ``txgen`` samples the RF
transmit waveform itself for cross-checks.
"""

__version__ = "0.1.0"

from .errors import (ConfigError, InvalidParameterError, MetrologyError, PlanError,  # noqa: E402
                     RadarSimError, ReconstructionError)
from .plan import (WaveformPlan, equivalent_bandwidth, interference_masked_subpulses,  # noqa: E402
                   n_max, reference_plan, theoretical_resolution, validate_plan)
from .scene import GapSpec, Scatterer, Scene, make_two_target_scene, make_v_scene  # noqa: E402
from .dechirp import SubSignalFrame, apply_gap, dechirp_frame  # noqa: E402
from .synth import SyntheticSignal, coherence_residual, stitch  # noqa: E402
from .profile import (RangeProfile, extract_peaks, mainlobe_width_392,  # noqa: E402
                      measured_resolution, range_profile)
from .gapfill import fill_gap, fit_ar  # noqa: E402
from .isar import IsarImage, collect_trains, cross_range_resolution, form_image  # noqa: E402

__all__ = [
    "ConfigError", "InvalidParameterError", "MetrologyError", "PlanError", "RadarSimError",
    "ReconstructionError", "WaveformPlan", "equivalent_bandwidth",
    "interference_masked_subpulses", "n_max", "reference_plan", "theoretical_resolution",
    "validate_plan", "GapSpec", "Scatterer", "Scene", "make_two_target_scene", "make_v_scene",
    "SubSignalFrame", "apply_gap", "dechirp_frame", "SyntheticSignal", "coherence_residual",
    "stitch", "RangeProfile", "extract_peaks", "mainlobe_width_392", "measured_resolution",
    "range_profile", "fill_gap", "fit_ar", "IsarImage", "collect_trains",
    "cross_range_resolution", "form_image",
]
