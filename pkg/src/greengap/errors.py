"""Exception hierarchy shared by all greengap modules."""


class GreenGapError(Exception):
    """Base class for every error raised by greengap."""


class ConfigurationError(GreenGapError, ValueError):
    """Invalid distribution, calibration, policy or sweep parameters."""


class SamplingError(GreenGapError, RuntimeError):
    """A sampler could not produce a draw (e.g. rejection budget exhausted)."""


class DomainError(GreenGapError, ValueError):
    """A formula was evaluated outside its mathematical domain."""


class DataError(GreenGapError, ValueError):
    """Input data unusable for the requested operation."""


class SchemaError(DataError):
    """A CSV input is missing required columns."""


class FitError(GreenGapError, RuntimeError):
    """Maximum-likelihood fitting failed."""


class CalibrationError(GreenGapError, RuntimeError):
    """Building a calibration from audit data failed."""


class StateError(GreenGapError, RuntimeError):
    """An operation needs data that was not retained."""


class InversionError(GreenGapError, RuntimeError):
    """Implicit-parameter search could not reach the target rate.

    Attributes
    ----------
    bracket : tuple of float
        Parameter values at the ends of the search bracket.
    bracket_rates : tuple of float
        Simulated implementation rates at those endpoints.
    """

    def __init__(self, message, bracket=None, bracket_rates=None):
        super().__init__(message)
        self.bracket = bracket
        self.bracket_rates = bracket_rates
