"""Dense bit-packed linear algebra over GF(2).

Vectors and matrices store their bits in little-endian ``uint64`` words:
coordinate ``j`` lives in bit ``j % 64`` of word ``j // 64``.  Bits past the
last coordinate are always zero, so equality and Hamming weight work on
whole words without masking.

All objects are immutable; every operation returns a new value.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence

import numpy as np

from .errors import DimensionMismatch

WORD_BITS = 64


def n_words(length: int) -> int:
    return (length + WORD_BITS - 1) // WORD_BITS


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a 2-D 0/1 array of shape ``(rows, cols)`` into ``uint64`` words."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.ndim != 2:
        raise ValueError("pack_bits expects a 2-D array")
    rows, cols = bits.shape
    words = n_words(cols)
    packed = np.packbits(bits & 1, axis=1, bitorder="little")
    out = np.zeros((rows, words * 8), dtype=np.uint8)
    out[:, : packed.shape[1]] = packed
    return out.view("<u8").astype(np.uint64).reshape(rows, words)


def unpack_bits(words: np.ndarray, cols: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`."""
    words = np.ascontiguousarray(words, dtype=np.uint64)
    rows = words.shape[0]
    as_bytes = words.astype("<u8").view(np.uint8).reshape(rows, words.shape[1] * 8)
    return np.unpackbits(as_bytes, axis=1, count=cols, bitorder="little")


def popcount_rows(words: np.ndarray) -> np.ndarray:
    """Hamming weight of each row of a packed ``(N, words)`` array."""
    return np.bitwise_count(words).sum(axis=1, dtype=np.int64)


def parity_rows(words: np.ndarray) -> np.ndarray:
    return (popcount_rows(words) & 1).astype(np.uint8)


class BitVector:
    """A fixed-length binary vector."""

    __slots__ = ("length", "words")

    def __init__(self, length: int, words: np.ndarray):
        words = np.array(words, dtype=np.uint64).reshape(-1)
        if words.shape[0] != n_words(length):
            raise ValueError(f"expected {n_words(length)} words for length {length}")
        tail = length % WORD_BITS
        if tail and int(words[-1]) >> tail:
            raise ValueError("bits set beyond the vector length")
        self.length = length
        self.words = _frozen(words)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BitVector:
        bits = np.fromiter((int(b) & 1 for b in bits), dtype=np.uint8)
        return cls(bits.size, pack_bits(bits.reshape(1, -1))[0])

    @classmethod
    def zeros(cls, length: int) -> BitVector:
        return cls(length, np.zeros(n_words(length), dtype=np.uint64))

    @classmethod
    def from_support(cls, length: int, support: Iterable[int]) -> BitVector:
        bits = np.zeros(length, dtype=np.uint8)
        bits[list(support)] = 1
        return cls.from_bits(bits)

    def to_bits(self) -> np.ndarray:
        return unpack_bits(self.words.reshape(1, -1), self.length)[0]

    def support(self) -> list[int]:
        return np.flatnonzero(self.to_bits()).tolist()

    def weight(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def _check(self, other: BitVector) -> None:
        if self.length != other.length:
            raise DimensionMismatch(f"lengths differ: {self.length} vs {other.length}")

    def __add__(self, other: BitVector) -> BitVector:
        self._check(other)
        return BitVector(self.length, self.words ^ other.words)

    def __and__(self, other: BitVector) -> BitVector:
        self._check(other)
        return BitVector(self.length, self.words & other.words)

    def overlap(self, other: BitVector) -> int:
        """Number of coordinates set in both vectors."""
        return (self & other).weight()

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise IndexError(j)
        return (int(self.words[j // WORD_BITS]) >> (j % WORD_BITS)) & 1

    def __len__(self) -> int:
        return self.length

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self.length == other.length and bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.length, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"BitVector({''.join(map(str, self.to_bits()))})"


def inner_product(a: BitVector, b: BitVector) -> int:
    """GF(2) inner product: parity of the number of shared set bits."""
    if a.length != b.length:
        raise DimensionMismatch(f"lengths differ: {a.length} vs {b.length}")
    return int(np.bitwise_count(a.words & b.words).sum()) & 1


class BitMatrix:
    """A binary matrix stored as packed rows, shape ``(rows, n_words(cols))``."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, cols: int, data: np.ndarray):
        data = np.array(data, dtype=np.uint64)
        if data.size == 0:
            data = data.reshape(0, n_words(cols))
        if data.ndim != 2 or data.shape[1] != n_words(cols):
            raise ValueError(f"row data must have {n_words(cols)} words per row")
        tail = cols % WORD_BITS
        if tail and data.shape[0] and np.any(data[:, -1] >> np.uint64(tail)):
            raise ValueError("bits set beyond the column count")
        self.rows = data.shape[0]
        self.cols = cols
        self.data = _frozen(data)

    @classmethod
    def from_bits(cls, bits, cols: int | None = None) -> BitMatrix:
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.size == 0:
            if cols is None:
                cols = bits.shape[1] if bits.ndim == 2 else 0
            return cls(cols, np.zeros((0, n_words(cols)), dtype=np.uint64))
        return cls(bits.shape[1], pack_bits(bits))

    @classmethod
    def from_vectors(cls, vectors: Sequence[BitVector], cols: int | None = None) -> BitMatrix:
        if not vectors:
            if cols is None:
                raise ValueError("cols is required for an empty matrix")
            return cls(cols, np.zeros((0, n_words(cols)), dtype=np.uint64))
        length = vectors[0].length
        for v in vectors:
            if v.length != length:
                raise DimensionMismatch("rows of unequal length")
        return cls(length, np.stack([v.words for v in vectors]))

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls.from_bits(np.eye(n, dtype=np.uint8), cols=n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        return cls(cols, np.zeros((rows, n_words(cols)), dtype=np.uint64))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def to_bits(self) -> np.ndarray:
        return unpack_bits(self.data, self.cols)

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.data[i])

    def __iter__(self) -> Iterator[BitVector]:
        return (self.row(i) for i in range(self.rows))

    def __len__(self) -> int:
        return self.rows

    def weights(self) -> np.ndarray:
        return popcount_rows(self.data)

    def take_rows(self, indices: Sequence[int]) -> BitMatrix:
        return BitMatrix(self.cols, self.data[np.asarray(indices, dtype=np.intp)])

    def take_columns(self, columns: Sequence[int]) -> BitMatrix:
        """Keep the given columns, in the given order."""
        columns = np.asarray(columns, dtype=np.intp)
        return BitMatrix.from_bits(self.to_bits()[:, columns], cols=columns.size)

    def vstack(self, other: BitMatrix) -> BitMatrix:
        if self.cols != other.cols:
            raise DimensionMismatch(f"column counts differ: {self.cols} vs {other.cols}")
        return BitMatrix(self.cols, np.concatenate([self.data, other.data]))

    def hstack(self, other: BitMatrix) -> BitMatrix:
        if self.rows != other.rows:
            raise DimensionMismatch(f"row counts differ: {self.rows} vs {other.rows}")
        bits = np.concatenate([self.to_bits(), other.to_bits()], axis=1)
        return BitMatrix.from_bits(bits, cols=self.cols + other.cols)

    def products(self, other: BitMatrix) -> np.ndarray:
        """Matrix of inner products ``self @ other.T`` over GF(2)."""
        if self.cols != other.cols:
            raise DimensionMismatch(f"column counts differ: {self.cols} vs {other.cols}")
        out = np.zeros((self.rows, other.rows), dtype=np.uint8)
        for i in range(self.rows):
            out[i] = parity_rows(other.data & self.data[i])
        return out

    def apply(self, v: BitVector) -> np.ndarray:
        """Syndrome ``M · vᵀ`` as a 0/1 array of length ``rows``."""
        if v.length != self.cols:
            raise DimensionMismatch(f"vector length {v.length} vs {self.cols} columns")
        return parity_rows(self.data & v.words)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.cols == other.cols and bool(np.array_equal(self.data, other.data))

    def __hash__(self) -> int:
        return hash((self.cols, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


def rref_pivot_order(
    M: BitMatrix, column_priority: Sequence[int] | None = None
) -> tuple[BitMatrix, list[int]]:
    """Reduced row echelon form with pivots chosen in a prescribed column order.

    Columns are visited in ``column_priority`` order.  Each visited column
    becomes a pivot if some not-yet-pivotal row has a 1 there; the lowest
    such row index is used.  The pivot is then cleared from every other row.

    Returns:
        ``(R, pivots)`` where the rows of ``R`` are the nonzero reduced rows
        ordered by pivot, and ``pivots[i]`` is the pivot column of row ``i``.
    """
    cols = M.cols
    if column_priority is None:
        column_priority = range(cols)
    priority = np.asarray(list(column_priority), dtype=np.intp)
    if priority.size != cols or not np.array_equal(np.sort(priority), np.arange(cols)):
        raise ValueError("column_priority must be a permutation of the columns")

    data = np.array(M.data, dtype=np.uint64)
    is_pivot_row = np.zeros(M.rows, dtype=bool)
    pivot_rows: list[int] = []
    pivots: list[int] = []
    for c in priority:
        if len(pivots) == M.rows:
            break
        word, bit = divmod(int(c), WORD_BITS)
        has = ((data[:, word] >> np.uint64(bit)) & np.uint64(1)).astype(bool)
        candidates = np.flatnonzero(has & ~is_pivot_row)
        if candidates.size == 0:
            continue
        p = int(candidates[0])
        has[p] = False
        data[has] ^= data[p]
        is_pivot_row[p] = True
        pivot_rows.append(p)
        pivots.append(int(c))
    return BitMatrix(cols, data[pivot_rows]), pivots


def rank(M: BitMatrix) -> int:
    return len(rref_pivot_order(M)[1])


def kernel_basis(M: BitMatrix) -> BitMatrix:
    """Basis of the right kernel ``{x : M xᵀ = 0}``, one vector per free column."""
    R, pivots = rref_pivot_order(M)
    free = np.setdiff1d(np.arange(M.cols), pivots)
    K = np.zeros((free.size, M.cols), dtype=np.uint8)
    K[np.arange(free.size), free] = 1
    if pivots:
        K[:, pivots] = R.to_bits()[:, free].T
    return BitMatrix.from_bits(K, cols=M.cols)


def row_space_equal(A: BitMatrix, B: BitMatrix) -> bool:
    r = rank(A)
    return r == rank(B) and rank(A.vstack(B)) == r


def row_space_contains(A: BitMatrix, B: BitMatrix) -> bool:
    """True if every row of ``B`` lies in the row space of ``A``."""
    return rank(A.vstack(B)) == rank(A)


def span_chunks(M: BitMatrix, chunk_rows: int = 16) -> Iterator[np.ndarray]:
    """Yield every element of the row space of ``M`` exactly once.

    Elements are produced as packed ``(N, words)`` arrays in reflected
    Gray-code order over the message bits: the first ``chunk_rows`` rows are
    expanded into a lookup table, which later chunks traverse alternately
    backwards and forwards after a single row XOR.  Rows are assumed
    independent.
    """
    data = M.data
    low, high = data[:chunk_rows], data[chunk_rows:]
    table = np.zeros((1, data.shape[1]), dtype=np.uint64)
    for row in low:
        table = np.concatenate([table, table[::-1] ^ row])
    yield table
    backward = table[::-1]
    offset = np.zeros(data.shape[1], dtype=np.uint64)
    for i in range(1, 1 << len(high)):
        offset = offset ^ high[(i & -i).bit_length() - 1]
        yield (backward if i & 1 else table) ^ offset


def gray_subsets(k: int) -> Iterator[tuple[int, int]]:
    """Yield ``(mask, flipped_index)`` for all k-bit masks in Gray-code order.

    The first item is ``(0, -1)``; afterwards ``flipped_index`` names the one
    bit that changed.
    """
    yield 0, -1
    mask = 0
    for i in range(1, 1 << k):
        j = (i & -i).bit_length() - 1
        mask ^= 1 << j
        yield mask, j
