"""Exception types shared across subpackages."""


class DegenerateError(ValueError):
    """Input lies on a set where a formula divides by zero."""


class NonConvergenceError(RuntimeError):
    """A numerical scheme did not meet its tolerance."""

    def __init__(self, message: str, diagnostic: dict | None = None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}


class UnderflowError(ArithmeticError):
    """A kernel value fell below the configured floor."""


class FitFailure(RuntimeError):
    """A fit or feasibility problem the theory guarantees to be solvable had no solution."""
