"""Reed-Muller codes and their punctured and shortened variants.

Coordinates are the points of F_2^m encoded as integers (x_1 is the least
significant bit), sorted by Hamming weight and then by value.  With this
order the points of weight <= w form a prefix, so puncturing them is a
prefix drop.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from . import gf2
from .errors import ConstraintError, check_budget
from .gf2 import BitMatrix

DEFAULT_BUDGET = 1 << 22


def binom_sum_le(m: int, t: int) -> int:
    """Sum of binom(m, i) for 0 <= i <= t (exact)."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if t < 0:
        return 0
    return sum(comb(m, i) for i in range(min(t, m) + 1))


def binom_sum_gt(m: int, t: int) -> int:
    """Sum of binom(m, i) for t < i <= m."""
    return (1 << m) - binom_sum_le(m, t)


@dataclass(frozen=True)
class CoordinateOrder:
    m: int
    points: tuple[int, ...]

    def prefix_length(self, w: int) -> int:
        """Number of leading points with Hamming weight <= w."""
        return binom_sum_le(self.m, w)

    def weights(self) -> np.ndarray:
        return np.array([p.bit_count() for p in self.points], dtype=np.int64)


@lru_cache(maxsize=None)
def coordinate_order(m: int) -> CoordinateOrder:
    points = sorted(range(1 << m), key=lambda v: (v.bit_count(), v))
    return CoordinateOrder(m, tuple(points))


@dataclass(frozen=True)
class RmSpec:
    r: int
    m: int
    w: int = -1

    def __post_init__(self):
        if self.m < 0:
            raise ConstraintError("m >= 0 violated")
        if not -1 <= self.r <= self.m:
            raise ConstraintError("-1 <= r <= m violated")
        if self.w >= self.m:
            raise ConstraintError("w < m violated")


@dataclass(frozen=True)
class LinearCode:
    kind: str  # "RM", "PRM" or "SRM"
    spec: RmSpec
    generator: BitMatrix
    coordinates: tuple[int, ...]

    @property
    def length(self) -> int:
        return self.generator.cols

    @property
    def dimension(self) -> int:
        return self.generator.rows


def monomials(m: int, r: int) -> list[tuple[int, ...]]:
    """Variable subsets of size <= r, by degree and then lexicographically."""
    return [s for deg in range(r + 1) for s in itertools.combinations(range(m), deg)]


def evaluation_matrix(m: int, r: int) -> np.ndarray:
    """0/1 evaluations of every monomial of degree <= r on the canonical points."""
    points = np.array(coordinate_order(m).points, dtype=np.int64)
    subsets = monomials(m, r)
    bits = np.zeros((len(subsets), points.size), dtype=np.uint8)
    for i, s in enumerate(subsets):
        mask = sum(1 << j for j in s)
        bits[i] = (points & mask) == mask
    return bits


def rm_generator(r: int, m: int) -> LinearCode:
    if r > m:
        raise ConstraintError("r <= m violated")
    spec = RmSpec(r, m)
    generator = BitMatrix.from_bits(evaluation_matrix(m, r), cols=1 << m)
    return LinearCode("RM", spec, generator, coordinate_order(m).points)


def prm_generator(r: int, m: int, w: int) -> LinearCode:
    """RM(r, m) with the coordinates of weight <= w dropped."""
    if not m - r > w:
        raise ConstraintError("m - r > w violated")
    full = rm_generator(r, m)
    spec = RmSpec(r, m, w)
    k = binom_sum_le(m, w)
    if k == 0:
        return LinearCode("PRM", spec, full.generator, full.coordinates)
    kept = range(k, 1 << m)
    return LinearCode("PRM", spec, full.generator.take_columns(kept), full.coordinates[k:])


def identity_block_split(r: int, m: int, w: int) -> tuple[BitMatrix, BitMatrix, list[int]]:
    """Eliminate RM(r, m) with the punctured coordinates taking pivot priority.

    Returns ``(top, bottom, pivots)`` on the full 2^m coordinates.  ``top``
    holds the rows whose pivot is a punctured coordinate; ``bottom`` holds
    the rest, which vanish on every punctured coordinate.  When m - r > w the
    punctured block of ``top`` is the identity.
    """
    full = rm_generator(r, m).generator
    k = binom_sum_le(m, w)
    R, pivots = gf2.rref_pivot_order(full, range(full.cols))
    n_top = sum(1 for p in pivots if p < k)
    return R.take_rows(range(n_top)), R.take_rows(range(n_top, R.rows)), pivots


def srm_generator(r: int, m: int, w: int) -> LinearCode:
    """Codewords of RM(r, m) that vanish on all points of weight <= w, punctured."""
    spec = RmSpec(r, m, w)
    k = binom_sum_le(m, w)
    points = coordinate_order(m).points
    if r < 0:
        return LinearCode("SRM", spec, BitMatrix.zeros(0, (1 << m) - k), points[k:])
    _, bottom, _ = identity_block_split(r, m, w)
    if k and np.any(bottom.to_bits()[:, :k]):
        raise AssertionError("shortened rows do not vanish on punctured coordinates")
    generator = bottom.take_columns(range(k, 1 << m)) if k else bottom
    return LinearCode("SRM", spec, generator, points[k:])


def weight_distribution(M: BitMatrix, budget: int = DEFAULT_BUDGET, what: str = "span") -> np.ndarray:
    """Counts of codewords by Hamming weight, from exhaustive enumeration.

    ``M`` must have independent rows.
    """
    check_budget(what, 1 << M.rows, budget)
    counts = np.zeros(M.cols + 1, dtype=np.int64)
    for chunk in gf2.span_chunks(M):
        counts += np.bincount(gf2.popcount_rows(chunk), minlength=M.cols + 1)
    return counts


def min_punctured_weight_brute(r: int, m: int, w: int, budget: int = DEFAULT_BUDGET) -> int:
    """Minimum over nonzero f in RM(r, m) of the number of points |v| > w with f(v) = 1."""
    G = rm_generator(r, m).generator
    check_budget(f"RM({r},{m}) enumeration", 1 << G.rows, budget)
    if G.rows == 0:
        raise ConstraintError("RM(-1, m) has no nonzero codewords")
    keep = BitMatrix.from_bits((coordinate_order(m).weights() > w).astype(np.uint8)[None, :])
    mask = keep.data[0]
    best = None
    first = True
    for chunk in gf2.span_chunks(G):
        weights = gf2.popcount_rows(chunk & mask)
        if first:
            weights = weights[1:]  # the zero message
            first = False
        if weights.size:
            low = int(weights.min())
            best = low if best is None else min(best, low)
    return best


def weight_divisibility_check(
    r: int, m: int, nu: int, budget: int = DEFAULT_BUDGET, force: bool = False
) -> bool:
    """Exhaustively test that every codeword weight of RM(r, m) is divisible by 2^nu."""
    if not force and not m > nu * r:
        raise ConstraintError("m > nu*r violated")
    counts = weight_distribution(rm_generator(r, m).generator, budget, f"RM({r},{m})")
    weights = np.flatnonzero(counts)
    return bool(np.all(weights % (1 << nu) == 0))


def duality_check(r: int, m: int, w: int) -> bool:
    """Check SRM(r,m,w) = PRM(m-r-1,m,w)^perp and SRM(r,m,w) within PRM(r,m,w)."""
    if w >= 0 and not w < r:
        raise ConstraintError("w < r violated")
    if not m - r > w:
        raise ConstraintError("m - r > w violated")
    srm = srm_generator(r, m, w).generator
    dual = prm_generator(m - r - 1, m, w).generator
    prm = prm_generator(r, m, w).generator
    orthogonal = not np.any(srm.products(dual)) if srm.rows and dual.rows else True
    complementary = gf2.rank(srm) + gf2.rank(dual) == binom_sum_gt(m, w)
    contained = gf2.row_space_contains(prm, srm)
    return bool(orthogonal and complementary and contained)


def algebraic_degree(values: np.ndarray, m: int) -> int:
    """Degree of the polynomial whose truth table (natural point order) is ``values``.

    Returns -1 for the zero function.
    """
    anf = np.array(values, dtype=np.uint8).copy()
    for i in range(m):
        step = 1 << i
        view = anf.reshape(-1, 2 * step)
        view[:, step:] ^= view[:, :step]
    nz = np.flatnonzero(anf)
    if nz.size == 0:
        return -1
    return max(int(v).bit_count() for v in nz)
