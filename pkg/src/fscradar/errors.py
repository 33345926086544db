"""Exception types raised across the toolkit."""


class RadarSimError(Exception):
    """Base class for all toolkit errors."""


class InvalidParameterError(RadarSimError, ValueError):
    """A parameter is outside its allowed domain."""


class PlanError(InvalidParameterError):
    """A waveform plan breaks one or more feasibility constraints."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid waveform plan: {lines}")


class MetrologyError(RadarSimError):
    """A spectral measurement could not be made (e.g. no -3.92 dB crossing)."""


class ReconstructionError(RadarSimError):
    """Gap filling failed (flank too short, nothing left to fit, ...)."""


class ConfigError(RadarSimError):
    """Scenario configuration could not be parsed."""
