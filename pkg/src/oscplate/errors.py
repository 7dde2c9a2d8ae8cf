"""Exception types shared by the package."""


class OscPlateError(Exception):
    """Base class for all package errors."""


class InvalidArgument(OscPlateError, ValueError):
    """An argument violates a documented precondition."""


class OutOfDomain(OscPlateError, ValueError):
    """A point lies outside the domain where a map is defined."""


class NumericalFailure(OscPlateError, RuntimeError):
    """A numerical procedure failed (non-convergence, singular system, ...)."""
