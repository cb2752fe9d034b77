"""Exception and warning types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid estimator, plan or experiment configuration."""


class NumericError(ArithmeticError):
    """A computation produced a nonfinite or unusable value."""

    def __init__(self, message, lag=None, block=None):
        super().__init__(message)
        self.lag = lag
        self.block = block


class NoFiniteSmoothnessError(ValueError):
    """The kernel has no finite smoothness constant usable by bandwidth rules."""


class DegenerateDataWarning(UserWarning):
    """Data too degenerate for a fit; a documented fallback was used."""
