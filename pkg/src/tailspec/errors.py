"""Exception hierarchy.

``InputError`` covers malformed arguments and data (CLI exit code 2);
``NumericalError`` covers degenerate samples, infeasible constraints and
solver failures (CLI exit code 3).
"""


class TailspecError(Exception):
    """Base class for all package errors."""


class InputError(TailspecError, ValueError):
    """Bad arguments, files, columns or configuration."""


class NumericalError(TailspecError, ArithmeticError):
    """A computation could not be carried out on the given data."""


class DegenerateSampleError(NumericalError):
    """Zero-variance angles, too few exceedances, constant columns."""


class InfeasibleError(NumericalError):
    """The mean constraint cannot be met with positive weights."""


class ConvergenceError(NumericalError):
    """An iterative solver did not reach its tolerance."""
