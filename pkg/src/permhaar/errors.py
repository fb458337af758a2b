"""Exception types shared across the package."""


class PermHaarError(Exception):
    """Base class for all errors raised by :mod:`permhaar`."""


class DomainError(PermHaarError, ValueError):
    """An argument lies outside the domain of the operation."""


class ResourceGuardError(PermHaarError, RuntimeError):
    """An enumeration would exceed its configured budget."""


class SingularSystemError(PermHaarError, ArithmeticError):
    """A linear system over the rationals has no unique solution."""
