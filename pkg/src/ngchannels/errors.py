"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class TruncationError(RuntimeError):
    """The Fock-space cutoff is too small for the requested accuracy."""


class InvalidStateError(ValueError):
    """A matrix fails the density-operator checks (e.g. negative eigenvalues)."""


class NonConvergenceError(RuntimeError):
    """An iterative or adaptive numerical procedure failed to converge."""
