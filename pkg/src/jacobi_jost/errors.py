"""Exception hierarchy; each CLI exit code maps to one branch."""


class JostError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ConfigError(JostError, ValueError):
    """Invalid model parameters or configuration."""

    exit_code = 2


class DomainError(JostError, ValueError):
    """Input outside the domain of an operation."""

    exit_code = 2


class RangeError(JostError, OverflowError):
    """Index or exponent outside the representable range."""

    exit_code = 2


class UnsupportedError(JostError):
    """Family or variant without the metadata an operation needs."""

    exit_code = 3


class HorizonError(JostError):
    """The requested tolerance cannot be met within the horizon."""

    exit_code = 4

    def __init__(self, message, best_bound=None):
        super().__init__(message)
        self.best_bound = best_bound


class UnresolvedSpectrumError(JostError):
    """Eigenvalue count did not stabilize under grid refinement."""

    exit_code = 5

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class VerificationError(JostError):
    """An internal consistency check failed."""

    exit_code = 6
