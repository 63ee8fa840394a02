"""Exception types shared by the numerical modules and the CLI."""


class EfimovError(Exception):
    """Base class for errors raised by this package."""


class DomainError(EfimovError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class ResourceCapError(EfimovError):
    """A requested discretization exceeds the configured size cap."""


class ConvergenceError(EfimovError, RuntimeError):
    """A root bracket or iterative refinement failed."""
