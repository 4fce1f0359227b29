"""Exception types shared across the package.

The CLI maps these onto process exit codes: validation problems exit
with 2, numeric failures (blow-up, singular systems) with 3 and I/O
problems with 4.
"""


class TimosimError(Exception):
    """Base class for all package errors."""


class ValidationError(TimosimError):
    """A configuration value or invariant check failed.

    ``paths`` optionally lists the dotted config keys that are invalid,
    e.g. ``["params.rho1"]``.
    """

    def __init__(self, message, paths=None):
        super().__init__(message)
        self.paths = list(paths) if paths else []


class DomainError(TimosimError):
    """An argument lies outside the mathematical domain of an operation."""


class NumericError(TimosimError):
    """A numerical computation failed (non-finite values, singular matrix)."""


class InsufficientDataError(TimosimError):
    """A data series is too short for the requested fit."""
