"""Exception types raised across the package."""


class PidRateError(Exception):
    """Base class for every error raised by pidrate."""


class FixedParseError(PidRateError, ValueError):
    """Decimal text could not be parsed as a fixed-point value."""


class FixedOverflowError(PidRateError, OverflowError):
    """A fixed-point result left the signed 128-bit raw range."""


class ConvergenceError(PidRateError, ArithmeticError):
    """A Newton solver did not settle within its iteration cap."""


class PoolError(PidRateError, ValueError):
    """Invalid pool state or a swap that would drain the pool."""


class TimeRegressionError(PidRateError, ValueError):
    """Controller update timestamp earlier than the previous one."""


class ConfigError(PidRateError, ValueError):
    """Scenario, controller or CLI configuration failed validation."""


class BracketingError(PidRateError, ArithmeticError):
    """The phi sweep could not bracket the target recovery time."""

    def __init__(self, message: str, ratio=None):
        super().__init__(message)
        self.ratio = ratio
