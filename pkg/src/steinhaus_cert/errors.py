"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation supports."""


class ConvergenceError(ArithmeticError):
    """An iterative numerical procedure did not converge."""


class ConstructionError(RuntimeError):
    """A constructive step (lemma constants, spacing, plan) could not be completed."""
