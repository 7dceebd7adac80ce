"""Quantum CSS codes from punctured Reed-Muller codes.

For integers 0 <= 2w < 2r < m the code has X stabilizers SRM(r, m, w) and
Z stabilizers SRM(m-r-1, m, w) on the binom(m, >w) points of weight > w.
Logical operators come from eliminating RM(r, m) (and RM(m-r-1, m)) with the
punctured coordinates first: the rows with a punctured pivot, restricted to
the kept coordinates, are the logical representatives.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import gf2, rm
from .errors import ConstraintError, check_budget
from .gf2 import BitMatrix

EXHAUSTIVE_LIMIT = 1 << 24
DEFAULT_TRIALS = 10**6


def check_family(m: int, r: int, w: int) -> None:
    """Raise ``ConstraintError`` naming the first violated part of 0 <= 2w < 2r < m."""
    if not 0 <= 2 * w:
        raise ConstraintError("0 <= 2w violated")
    if not 2 * w < 2 * r:
        raise ConstraintError("2w < 2r violated")
    if not 2 * r < m:
        raise ConstraintError("2r < m violated")


def max_level(m: int, r: int) -> int:
    """Largest nu with m > nu*r."""
    return (m - 1) // r


@dataclass(frozen=True)
class CodeFamilyParams:
    m: int
    r: int
    w: int

    def __post_init__(self):
        check_family(self.m, self.r, self.w)

    @property
    def nu(self) -> int:
        return max_level(self.m, self.r)

    @property
    def n(self) -> int:
        return rm.binom_sum_gt(self.m, self.w)

    @property
    def k(self) -> int:
        return rm.binom_sum_le(self.m, self.w)

    @property
    def d(self) -> int:
        return rm.binom_sum_gt(self.r + 1, self.w)

    @property
    def d_x(self) -> int:
        return rm.binom_sum_gt(self.m - self.r, self.w)


@dataclass(frozen=True)
class CodeParams:
    n: int
    k: int
    d: int
    nu: int
    gamma: float


def params_formula(m: int, r: int, w: int) -> CodeParams:
    from .distill import gamma

    p = CodeFamilyParams(m, r, w)
    return CodeParams(p.n, p.k, p.d, p.nu, gamma(p.n, p.k, p.d))


@dataclass(frozen=True)
class CssCode:
    params: CodeFamilyParams
    x_stabilizers: BitMatrix
    z_stabilizers: BitMatrix
    logical_x: BitMatrix
    logical_z: BitMatrix

    @property
    def n(self) -> int:
        return self.x_stabilizers.cols

    @property
    def k(self) -> int:
        return self.logical_x.rows

    @cached_property
    def full_x_rows(self) -> BitMatrix:
        """Logical X rows then X stabilizer rows, as RM(r, m) codewords on all 2^m points.

        Logical row i is 1 on punctured coordinate i and 0 on the other
        punctured coordinates; stabilizers vanish there.
        """
        k = self.k
        top = BitMatrix.identity(k).hstack(self.logical_x)
        bottom = BitMatrix.zeros(self.x_stabilizers.rows, k).hstack(self.x_stabilizers)
        return top.vstack(bottom)


def _logical_block(r: int, m: int, w: int) -> BitMatrix:
    k = rm.binom_sum_le(m, w)
    top, _, pivots = rm.identity_block_split(r, m, w)
    if pivots[:k] != list(range(k)):
        raise AssertionError(f"punctured block of RM({r},{m}) is not the identity: pivots {pivots[:k]}")
    return top.take_columns(range(k, 1 << m))


def build_code(m: int, r: int, w: int, max_qubits: int = 1 << 16) -> CssCode:
    params = CodeFamilyParams(m, r, w)
    if (1 << m) > max_qubits:
        raise ConstraintError(f"2^m = {1 << m} exceeds max_qubits {max_qubits}")
    code = CssCode(
        params,
        x_stabilizers=rm.srm_generator(r, m, w).generator,
        z_stabilizers=rm.srm_generator(m - r - 1, m, w).generator,
        logical_x=_logical_block(r, m, w),
        logical_z=_logical_block(m - r - 1, m, w),
    )
    if code.logical_x.rows != params.k or code.logical_z.rows != params.k:
        raise AssertionError("logical rank deficiency")
    pairing = code.logical_x.products(code.logical_z)
    if not np.array_equal(pairing, np.eye(params.k, dtype=np.uint8)):
        raise AssertionError(f"logical pairing is not the identity:\n{pairing}")
    if not commutation_check(code):
        raise AssertionError("constructed code violates the commutation relations")
    return code


def commutation_check(code: CssCode) -> bool:
    """CSS orthogonality and symplectic pairing of the logical operators."""
    xs, zs, lx, lz = code.x_stabilizers, code.z_stabilizers, code.logical_x, code.logical_z
    if len({xs.cols, zs.cols, lx.cols, lz.cols}) != 1 or lx.rows != lz.rows:
        return False
    return bool(
        not xs.products(zs).any()
        and not lx.products(zs).any()
        and not lz.products(xs).any()
        and np.array_equal(lx.products(lz), np.eye(lx.rows, dtype=np.uint8))
    )


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a verification check.  Truthy iff the check passed."""

    passed: bool
    mode: str  # "exhaustive" or "sampled"
    evaluated: int
    detail: str = ""

    def __bool__(self) -> bool:
        return self.passed


def _coset_min_weight(offsets: BitMatrix, group: BitMatrix, budget: int, what: str) -> int:
    """Minimum weight over sum(offsets[S]) + g for S nonempty and g in span(group)."""
    check_budget(what, ((1 << offsets.rows) - 1) << group.rows, budget)
    best = None
    acc = np.zeros(offsets.data.shape[1], dtype=np.uint64)
    for mask, j in gf2.gray_subsets(offsets.rows):
        if j < 0:
            continue
        acc = acc ^ offsets.data[j]
        for chunk in gf2.span_chunks(group):
            low = int(gf2.popcount_rows(chunk ^ acc).min())
            best = low if best is None else min(best, low)
    return best


def distance_brute(code: CssCode, budget: int = EXHAUSTIVE_LIMIT) -> tuple[int, int]:
    """Exhaustive minimum weights of nontrivial Z and X logical operators.

    Returns ``(d_z, d_x)``; the code distance is their minimum.
    """
    d_z = _coset_min_weight(code.logical_z, code.z_stabilizers, budget, "Z-logical enumeration")
    d_x = _coset_min_weight(code.logical_x, code.x_stabilizers, budget, "X-logical enumeration")
    return d_z, d_x


def stabilizer_min_weight(code: CssCode, budget: int = EXHAUSTIVE_LIMIT) -> int:
    """Smallest nonzero weight in either stabilizer group."""
    best = None
    for group in (code.x_stabilizers, code.z_stabilizers):
        counts = rm.weight_distribution(group, budget, "stabilizer enumeration")
        nonzero = np.flatnonzero(counts[1:])
        if nonzero.size:
            low = int(nonzero[0]) + 1
            best = low if best is None else min(best, low)
    return best


def _level(code: CssCode, nu: int | None, force: bool) -> int:
    if nu is None:
        return code.params.nu
    if not force and not code.params.m > nu * code.params.r:
        raise ConstraintError("m > nu*r violated")
    return nu


def transversal_phase_check(
    code: CssCode,
    nu: int | None = None,
    budget: int = EXHAUSTIVE_LIMIT,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    force: bool = False,
) -> CheckResult:
    """Check weight(sum logical_x[S] + s) + |S| = 0 mod 2^nu over the X coset space.

    This congruence for every logical subset S and X stabilizer s is exactly
    what makes the transversal diag(1, exp(2 pi i/2^nu)) act as
    diag(1, exp(-2 pi i/2^nu)) on every logical qubit with no leftover phase.
    Enumerates all 2^k * 2^rank pairs when that fits in ``budget``; otherwise
    draws ``trials`` uniform pairs.
    """
    nu = _level(code, nu, force)
    modulus = 1 << nu
    lx, xs = code.logical_x, code.x_stabilizers
    total = 1 << (lx.rows + xs.rows)
    if total <= budget:
        acc = np.zeros(lx.data.shape[1], dtype=np.uint64)
        for mask, j in gf2.gray_subsets(lx.rows):
            if j >= 0:
                acc = acc ^ lx.data[j]
            size = mask.bit_count()
            for chunk in gf2.span_chunks(xs):
                if np.any((gf2.popcount_rows(chunk ^ acc) + size) % modulus):
                    return CheckResult(False, "exhaustive", total, f"violation at logical subset {mask:#x}")
        return CheckResult(True, "exhaustive", total)
    if trials <= 0:
        check_budget("transversal coset enumeration", total, budget)
    rng = np.random.default_rng(seed)
    gens = lx.vstack(xs).to_bits().astype(np.int64)
    done = 0
    while done < trials:
        batch = min(4096, trials - done)
        msg = rng.integers(0, 2, size=(batch, gens.shape[0]), dtype=np.int64)
        words = (msg @ gens) & 1
        weights = words.sum(axis=1) + msg[:, : lx.rows].sum(axis=1)
        bad = np.flatnonzero(weights % modulus)
        if bad.size:
            return CheckResult(False, "sampled", done + int(bad[0]) + 1, "violation found by sampling")
        done += batch
    return CheckResult(True, "sampled", done)


def overlap_divisibility_check(
    code: CssCode,
    nu: int | None = None,
    l_max: int | None = None,
    budget: int = EXHAUSTIVE_LIMIT,
    force: bool = False,
) -> CheckResult:
    """Every l rows (2 <= l <= l_max) of the full X generator overlap in a multiple of 2^(nu-l+1)."""
    nu = _level(code, nu, force)
    l_max = nu if l_max is None else l_max
    if not 2 <= l_max <= nu:
        raise ConstraintError("2 <= l_max <= nu violated")
    rows = code.full_x_rows.data
    count = sum(math.comb(len(rows), l) for l in range(2, l_max + 1))
    check_budget("overlap subsets", count, budget)
    for l in range(2, l_max + 1):
        modulus = 1 << (nu - l + 1)
        for subset in itertools.combinations(range(len(rows)), l):
            common = np.bitwise_and.reduce(rows[list(subset)], axis=0)
            if int(np.bitwise_count(common).sum()) % modulus:
                return CheckResult(False, "exhaustive", count, f"rows {subset} overlap not divisible by {modulus}")
    return CheckResult(True, "exhaustive", count)
