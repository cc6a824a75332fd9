"""Exception types shared across the package."""


class CtfmLabError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CtfmLabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(CtfmLabError, ValueError):
    """A parameter combination is invalid (sample rate, filter design, ...)."""


class ShapeError(CtfmLabError, ValueError):
    """Signals passed to an element-wise operation are not aligned."""


class UnsupportedRangeError(CtfmLabError, ValueError):
    """An echo delay is too large for the dual-demodulator construction."""


class NoPeakError(CtfmLabError, ValueError):
    """A spectral band contains no usable peak."""


class ConfigLoadError(CtfmLabError, ValueError):
    """A configuration file failed to parse or validate.

    ``field`` names the offending key path when one is known.
    """

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
