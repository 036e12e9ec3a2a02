"""Exception hierarchy shared by all solver modules."""


class DickeError(Exception):
    """Base class for errors raised by gendicke."""


class DomainError(DickeError, ValueError):
    """Parameters or arguments outside the domain of an operation."""


class DegenerateModelError(DomainError):
    """Both the static field and the coupling vanish, so no axis is defined."""


class SolverError(DickeError, RuntimeError):
    """A numerical stage failed to produce a usable result."""
