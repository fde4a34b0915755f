"""Error types shared across the package.

ValidationError maps to CLI exit code 1, ConvergenceError to exit code 2.
"""


class ValidationError(ValueError):
    """Invalid physical parameters or request options."""


class ConvergenceError(RuntimeError):
    """A numerical procedure failed to reach its tolerance within budget.

    Carries the best value reached and an error bound so callers can degrade
    gracefully instead of aborting a whole table.
    """

    def __init__(self, message, value=None, bound=None):
        super().__init__(message)
        self.value = value
        self.bound = bound
