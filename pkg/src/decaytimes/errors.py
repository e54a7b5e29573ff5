class DecayTimesError(Exception):
    """Base class for all package errors."""


class ConfigError(DecayTimesError, ValueError):
    pass


class NegativeDensity(DecayTimesError):
    """A density takes negative values where a probability density is required."""


class NormalizationError(DecayTimesError):
    """A density carries no positive net probability, so it cannot be normalized."""


class EnvelopeDegenerate(DecayTimesError):
    pass


class ConvergenceError(DecayTimesError):
    pass


class SupportMismatch(DecayTimesError):
    pass


class TooFewEvents(DecayTimesError):
    pass


class UnsupportedCombination(DecayTimesError):
    """No closed leading-order formula exists for the requested case."""
