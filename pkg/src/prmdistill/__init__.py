"""Punctured quantum Reed-Muller codes for magic state distillation."""

from .css import CssCode, build_code, params_formula
from .distill import asymptotic_gamma, gamma, optimize_p, scan
from .errors import BudgetExceeded, ConstraintError, DimensionMismatch, ThresholdError

__all__ = [
    "BudgetExceeded",
    "ConstraintError",
    "CssCode",
    "DimensionMismatch",
    "ThresholdError",
    "asymptotic_gamma",
    "build_code",
    "gamma",
    "optimize_p",
    "params_formula",
    "scan",
]
