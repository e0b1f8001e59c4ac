"""Exception hierarchy shared by all modules."""


class AJELError(Exception):
    """Base class for errors raised by this package."""


class SizeError(AJELError, ValueError):
    """A sample is too small for the requested kernel or deletion."""


class ParameterError(AJELError, ValueError):
    """An argument lies outside its admissible range."""


class NumericError(AJELError, ArithmeticError):
    """Non-finite input or kernel output."""


class SolverFailure(AJELError, RuntimeError):
    """An iterative search hit its cap. Indicates a bug, not a data condition."""


class DataFormatError(AJELError, ValueError):
    """Malformed input file."""
