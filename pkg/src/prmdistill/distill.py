"""Distillation overhead analysis.

Covers the overhead exponent gamma = log(n/k)/log(d), concatenation of a
single code, exact and sampled output error of one detect-and-postselect
round, the large-code limit of gamma along m = 3r+1, and a parameter scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import gf2, rm
from .css import CssCode, check_family, max_level
from .errors import ConstraintError, ThresholdError, check_budget

P_LOW = 1 / 6
P_HIGH = 1 / 3


def gamma(n: int, k: int, d: int) -> float:
    """log(n/k) / log(d), using exact logarithms of the (possibly huge) integers."""
    if d < 2:
        raise ConstraintError("d >= 2 violated")
    if not n > k >= 1:
        raise ConstraintError("n > k >= 1 violated")
    return (math.log(n) - math.log(k)) / math.log(d)


@dataclass(frozen=True)
class OverheadModel:
    n: int
    k: int
    d: int
    prefactor: float = 1.0

    def __post_init__(self):
        if not self.n > self.k >= 1:
            raise ConstraintError("n > k >= 1 violated")
        if self.d < 2:
            raise ConstraintError("d >= 2 violated")
        if not self.prefactor > 0:
            raise ConstraintError("A > 0 violated")

    def step(self, eps: float) -> float:
        return self.prefactor * (self.n * eps) ** self.d

    @property
    def gamma(self) -> float:
        return gamma(self.n, self.k, self.d)


@dataclass(frozen=True)
class ConcatenationTrace:
    """Error rate after each level; ``log_eps`` survives underflow of ``eps``."""

    levels: list[tuple[int, float]]
    log_eps: list[float]
    z_final: int
    input_count: int
    output_count: int

    @property
    def ratio(self) -> float:
        return self.input_count / self.output_count

    @property
    def eps_out(self) -> float:
        return self.levels[-1][1]


def concat_trace(model: OverheadModel, eps_in: float, eps_target: float) -> ConcatenationTrace:
    """Iterate eps -> A (n eps)^d until the target error rate is reached."""
    if not eps_target > 0:
        raise ConstraintError("eps_target > 0 violated")
    if not 0 < eps_in <= 1:
        raise ConstraintError("0 < eps_in <= 1 violated")
    if eps_in > eps_target and not model.step(eps_in) < eps_in:
        raise ThresholdError(f"below threshold: A*(n*eps_in)^d < eps_in violated at eps_in={eps_in}")
    log_a, log_n, log_target = math.log(model.prefactor), math.log(model.n), math.log(eps_target)
    logs = [math.log(eps_in)]
    while logs[-1] > log_target:
        logs.append(log_a + model.d * (log_n + logs[-1]))
    z = len(logs) - 1
    levels = [(i, math.exp(x)) for i, x in enumerate(logs)]
    return ConcatenationTrace(levels, logs, z, model.n**z, model.k**z)


def overhead_scaling_exponent(model: OverheadModel, eps_in: float, eps_targets) -> float:
    """Least-squares slope of log(ratio) against log(log(1/eps_out)).

    ``eps_out`` is the error rate actually reached for each target, so the
    points sit on the staircase of integer concatenation depths.
    """
    eps_targets = list(eps_targets)
    if len(eps_targets) < 3:
        raise ConstraintError("at least 3 targets required")
    traces = [concat_trace(model, eps_in, t) for t in eps_targets]
    x = np.array([math.log(-t.log_eps[-1]) for t in traces])
    y = np.array([math.log(t.ratio) for t in traces])
    if np.ptp(x) == 0:
        if np.ptp(y) == 0:
            return 0.0
        raise ArithmeticError("degenerate fit: all targets reach the same error rate")
    return float(np.polyfit(x, y, 1)[0])


def binary_entropy(p: float) -> float:
    if not 0 <= p <= 1:
        raise ConstraintError("0 <= p <= 1 violated")
    if p in (0, 1):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def asymptotic_gamma(p: float) -> float:
    """Limit of gamma for m = 3r+1, w = 3rp as r grows: 3(1 - S(p)) / S(3p)."""
    if not P_LOW <= p < P_HIGH:
        raise ConstraintError("1/6 <= p < 1/3 violated")
    return 3 * (1 - binary_entropy(p)) / binary_entropy(3 * p)


@dataclass(frozen=True)
class AsymptoticPoint:
    p: float
    gamma: float


_INV_PHI = (math.sqrt(5) - 1) / 2


def optimize_p(tol: float = 1e-8) -> AsymptoticPoint:
    """Golden-section minimization of :func:`asymptotic_gamma` on (1/6, 1/3)."""
    if not tol > 0:
        raise ConstraintError("tol > 0 violated")
    a, b = P_LOW + 1e-9, P_HIGH - 1e-9
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = asymptotic_gamma(c), asymptotic_gamma(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = asymptotic_gamma(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = asymptotic_gamma(d)
    p = (a + b) / 2
    return AsymptoticPoint(p, asymptotic_gamma(p))


@dataclass(frozen=True)
class ScanRow:
    m: int
    r: int
    w: int
    nu: int
    n: int
    k: int
    d: int
    gamma: float
    flags: dict = field(default_factory=dict, compare=False)


def scan(r_max: int, constraint: str = "general", nu_min: int = 3, m_max: int | None = None) -> list[ScanRow]:
    """Enumerate codes with 0 <= 2w < 2r < m and m > nu_min*r, sorted by gamma.

    ``constraint`` is ``"general"`` or ``"m3r1"`` (m = 3r+1 only).  Under the
    general constraint m runs up to ``m_max``, by default the smallest m
    admitted at r = r_max.
    """
    if constraint not in ("general", "m3r1"):
        raise ConstraintError(f"unknown constraint {constraint!r}")
    if m_max is None:
        m_max = max(nu_min * r_max + 1, 2 * r_max + 1)
    rows = []
    for r in range(1, r_max + 1):
        ms = [3 * r + 1] if constraint == "m3r1" else range(2 * r + 1, m_max + 1)
        for m in ms:
            if not m > nu_min * r:
                continue
            for w in range(r):
                check_family(m, r, w)
                n, k, d = rm.binom_sum_gt(m, w), rm.binom_sum_le(m, w), rm.binom_sum_gt(r + 1, w)
                flags = {"2w<2r<m": True, "m>nu*r": m > nu_min * r, "m=3r+1": m == 3 * r + 1}
                rows.append(ScanRow(m, r, w, max_level(m, r), n, k, d, gamma(n, k, d), flags))
    rows.sort(key=lambda row: (row.gamma, row.r, row.m, row.w))
    return rows


@dataclass(frozen=True)
class OutputError:
    p_accept: float
    eps_block: float
    p_accept_err: float = 0.0
    eps_block_err: float = 0.0
    trials: int = 0
    accepted: int = 0
    failures: int = 0


def _binomial_weighted_sum(counts: np.ndarray, n: int, eps: float) -> float:
    return math.fsum(
        int(c) * eps**wt * (1 - eps) ** (n - wt) for wt, c in enumerate(counts) if c
    )


def exact_output_error(code: CssCode, eps: float, budget: int = rm.DEFAULT_BUDGET) -> OutputError:
    """Acceptance probability and block error of one postselected round, exactly.

    Independent Z flips with probability ``eps`` on each of the n inputs.  A
    pattern passes the X checks iff it lies in PRM(m-r-1, m, w) (the span of
    the Z logicals and Z stabilizers) and is harmless iff it lies in
    SRM(m-r-1, m, w).
    """
    if not 0 <= eps <= 1:
        raise ConstraintError("0 <= eps <= 1 violated")
    dual = code.logical_z.vstack(code.z_stabilizers)
    check_budget("PRM weight enumerator", 1 << dual.rows, budget)
    a_prm = rm.weight_distribution(dual, budget, "PRM weight enumerator")
    a_srm = rm.weight_distribution(code.z_stabilizers, budget, "SRM weight enumerator")
    n = code.n
    p_accept = _binomial_weighted_sum(a_prm, n, eps)
    p_bad = _binomial_weighted_sum(a_prm - a_srm, n, eps)
    return OutputError(p_accept, p_bad / p_accept)


def mc_output_error(
    code: CssCode, eps: float, trials: int, seed: int, batch_size: int = 1 << 16
) -> OutputError:
    """Monte Carlo estimate of :func:`exact_output_error`.

    Batch ``i`` draws from a generator seeded with ``(seed, i)``, so results
    depend only on ``seed``, ``trials`` and ``batch_size``.
    """
    if trials < 1:
        raise ConstraintError("trials >= 1 violated")
    if not 0 <= eps <= 1:
        raise ConstraintError("0 <= eps <= 1 violated")
    checks = code.x_stabilizers.data
    logicals = code.logical_x.data
    accepted = failures = 0
    for i, start in enumerate(range(0, trials, batch_size)):
        size = min(batch_size, trials - start)
        rng = np.random.default_rng([seed, i])
        errors = gf2.pack_bits((rng.random((size, code.n)) < eps).astype(np.uint8))
        ok = np.ones(size, dtype=bool)
        for row in checks:
            ok &= gf2.parity_rows(errors & row) == 0
        hit = np.zeros(size, dtype=bool)
        for row in logicals:
            hit |= gf2.parity_rows(errors & row) == 1
        accepted += int(ok.sum())
        failures += int((ok & hit).sum())
    p_accept = accepted / trials
    eps_block = failures / accepted if accepted else float("nan")
    p_err = math.sqrt(p_accept * (1 - p_accept) / trials)
    b_err = math.sqrt(eps_block * (1 - eps_block) / accepted) if accepted else float("nan")
    return OutputError(p_accept, eps_block, p_err, b_err, trials, accepted, failures)
