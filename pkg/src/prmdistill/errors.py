"""Exception types shared across the package."""

from __future__ import annotations


class ConstraintError(ValueError):
    """Parameters fall outside the regime an operation is defined for."""


class DimensionMismatch(ValueError):
    """Two bit vectors (or matrices) of incompatible lengths were combined."""


class ThresholdError(ValueError):
    """A concatenated distillation map does not contract at the input error rate."""


class BudgetExceeded(RuntimeError):
    """An exhaustive enumeration would visit more elements than allowed.

    Raised instead of returning a value so that a refusal can never be
    mistaken for a computed result.
    """

    def __init__(self, what: str, needed: int, budget: int):
        self.what = what
        self.needed = needed
        self.budget = budget
        super().__init__(f"{what}: {needed} elements exceeds budget {budget}")


def check_budget(what: str, needed: int, budget: int) -> None:
    if needed > budget:
        raise BudgetExceeded(what, needed, budget)
