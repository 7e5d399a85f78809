"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: InputError -> 2, ConvergenceError -> 3,
ComparisonFailure -> 4.
"""


class ExitspecError(Exception):
    """Base class for all toolkit errors."""


class InputError(ExitspecError):
    """Invalid geometry, mask, range, or file input."""


class ConvergenceError(ExitspecError):
    """A solver failed to meet its residual or iteration contract."""


class ComparisonFailure(ExitspecError):
    """An inequality check failed beyond its computed error budget."""
