"""Exception types shared across the package."""


class CAError(Exception):
    """Base class for all errors raised by cacc."""


class InvalidInput(CAError, ValueError):
    """An argument violates a documented precondition."""


class Unsupported(CAError):
    """The request is well formed but outside what the tool handles."""


class BudgetExceeded(CAError, MemoryError):
    """An enumeration or allocation would exceed the configured budget."""

    def __init__(self, what: str, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(f"{what} needs {required} bytes, budget is {budget} bytes")
