"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: UsageError -> 1, ValidationError (and
subclasses) -> 2, InfeasibleError -> 3.
"""


class RelaySecError(Exception):
    """Base class for all package errors."""


class UsageError(RelaySecError):
    """Caller broke an API contract: unknown label, overlapping sets,
    pattern/axis mismatch, wrong model for an operation."""


class ValidationError(RelaySecError, ValueError):
    """Input data violates a stated invariant (mass, sign, shape, schema)."""


class ModelAssumptionError(ValidationError):
    """A Gaussian closed form was requested outside its validity ordering
    (requires P1 + N1 <= N2, receiver 1 less noisy)."""


class InfeasibleError(RelaySecError):
    """A configuration is internally consistent but infeasible, e.g. a
    pure-noise rate above the compress-forward budget."""

    def __init__(self, message: str, *, limit: float | None = None):
        super().__init__(message)
        self.limit = limit


class BudgetExceededError(ValidationError):
    """A brute-force enumeration would exceed its evaluation budget."""

    def __init__(self, message: str, *, estimated: int):
        super().__init__(message)
        self.estimated = estimated
