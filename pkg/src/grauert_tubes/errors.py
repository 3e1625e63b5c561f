"""Exception hierarchy shared by every module."""

from __future__ import annotations


class GrauertError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(GrauertError, ValueError):
    """An argument lies outside the admissible domain."""


class UnsupportedFamilyError(DomainError):
    pass


class IntegrationDivergedError(GrauertError):
    """The integrator met a non-finite state or collapsed its step size."""

    def __init__(self, message: str, last_u: float):
        super().__init__(f"{message} (last good u = {last_u!r})")
        self.last_u = last_u


class NoBracketError(GrauertError):
    pass


class ConvergenceError(GrauertError):
    def __init__(self, message: str, best_a: float):
        super().__init__(f"{message} (best a = {best_a!r})")
        self.best_a = best_a


class InconsistentInputError(GrauertError):
    pass


class InsufficientGridError(GrauertError):
    pass
