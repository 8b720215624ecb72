"""Exception hierarchy shared by the library and the command line."""


class VolterraError(Exception):
    """Base class for every error raised by this package."""


class DomainError(VolterraError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class IndexOrderError(VolterraError, IndexError):
    """Delay indices out of range or not in non-decreasing order."""


class InputError(VolterraError, ValueError):
    """Mismatched or malformed input signals."""


class ConfigError(VolterraError, ValueError):
    """Trainer configuration rejected at validation."""


class SpecError(VolterraError, ValueError):
    """Invalid signal or oracle parameters."""


class ParseError(VolterraError, ValueError):
    """A signal, kernel or manifest file could not be parsed."""


class NumericError(VolterraError, ArithmeticError):
    """A computation produced a non-finite value.

    ``index`` is the first offending sample index, when known.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DivergenceError(NumericError):
    """NLMS training blew up; almost always a step size (alpha) problem."""

    def __init__(self, message, index=None, epoch=None):
        super().__init__(message, index)
        self.epoch = epoch
