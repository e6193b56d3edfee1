"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an input object violates a structural invariant."""


class ConsistencyError(RuntimeError):
    """Raised when two independent computation routes disagree."""
