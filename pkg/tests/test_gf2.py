import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import matrix_to_ints, rank_int_rows
from prmdistill import gf2, rm
from prmdistill.errors import DimensionMismatch
from prmdistill.gf2 import BitMatrix, BitVector


def bit_matrices(max_rows=12, max_cols=140):
    return st.tuples(st.integers(0, max_rows), st.integers(1, max_cols)).flatmap(
        lambda shape: arrays(np.uint8, shape, elements=st.integers(0, 1))
    )


def test_rank_examples():
    assert gf2.rank(BitMatrix.identity(3)) == 3
    assert gf2.rank(BitMatrix.zeros(4, 6)) == 0
    G = rm.rm_generator(1, 3).generator
    assert gf2.rank(G) == 4
    assert rank_int_rows(matrix_to_ints(G)) == 4


def test_rref_identity_natural_order():
    eye = BitMatrix.identity(5)
    R, pivots = gf2.rref_pivot_order(eye)
    assert R == eye
    assert pivots == [0, 1, 2, 3, 4]


def test_rref_follows_priority():
    R, pivots = gf2.rref_pivot_order(BitMatrix.from_bits([[1, 1]]), [1, 0])
    assert R.to_bits().tolist() == [[1, 1]]
    assert pivots == [1]


def test_rref_rm14_punctured_block():
    G = rm.rm_generator(1, 4).generator
    R, pivots = gf2.rref_pivot_order(G, range(16))
    assert sum(p < rm.binom_sum_le(4, 0) for p in pivots) == 1
    bits = R.to_bits()
    assert bits[0, 0] == 1 and not bits[1:, 0].any()


def test_rref_rejects_bad_priority():
    with pytest.raises(ValueError):
        gf2.rref_pivot_order(BitMatrix.identity(3), [0, 0, 1])


def test_kernel_examples():
    assert gf2.kernel_basis(BitMatrix.identity(4)).rows == 0
    K = gf2.kernel_basis(BitMatrix.from_bits([[1, 1]]))
    assert K.to_bits().tolist() == [[1, 1]]
    G = rm.rm_generator(1, 3).generator
    K = gf2.kernel_basis(G)
    assert K.shape == (4, 8)
    assert gf2.row_space_equal(K, G)


def test_inner_product_examples():
    a = BitVector.from_bits([1, 0, 1])
    assert gf2.inner_product(a, a) == 0
    assert gf2.inner_product(BitVector.from_bits([1, 1, 0]), BitVector.from_bits([0, 1, 1])) == 1
    assert gf2.inner_product(a, BitVector.zeros(3)) == 0


def test_length_mismatch_is_distinct():
    with pytest.raises(DimensionMismatch):
        gf2.inner_product(BitVector.zeros(3), BitVector.zeros(4))
    with pytest.raises(DimensionMismatch):
        BitVector.zeros(3) + BitVector.zeros(65)


def test_canonical_tail_enforced():
    with pytest.raises(ValueError):
        BitVector(3, np.array([0b1000], dtype=np.uint64))


def test_immutable():
    M = BitMatrix.identity(3)
    with pytest.raises(ValueError):
        M.data[0, 0] = 0


@given(bit_matrices())
@settings(max_examples=60, deadline=None)
def test_rank_matches_reference(bits):
    M = BitMatrix.from_bits(bits, cols=bits.shape[1])
    assert gf2.rank(M) == rank_int_rows(matrix_to_ints(M))
    assert gf2.rank(M) <= min(M.rows, M.cols)


@given(bit_matrices(), st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
def test_rref_properties(bits, rnd):
    M = BitMatrix.from_bits(bits, cols=bits.shape[1])
    priority = list(range(M.cols))
    rnd.shuffle(priority)
    R, pivots = gf2.rref_pivot_order(M, priority)
    assert R.rows == len(pivots) == gf2.rank(M)
    assert gf2.row_space_equal(R, M) if R.rows else gf2.rank(M) == 0
    rb = R.to_bits()
    for i, p in enumerate(pivots):
        assert rb[:, p].tolist() == [int(j == i) for j in range(R.rows)]
    order = {c: i for i, c in enumerate(priority)}
    assert [order[p] for p in pivots] == sorted(order[p] for p in pivots)


@given(bit_matrices())
@settings(max_examples=60, deadline=None)
def test_kernel_properties(bits):
    M = BitMatrix.from_bits(bits, cols=bits.shape[1])
    K = gf2.kernel_basis(M)
    assert gf2.rank(M) + K.rows == M.cols
    assert gf2.rank(K) == K.rows
    if M.rows and K.rows:
        assert not M.products(K).any()


@given(st.integers(1, 200).flatmap(lambda n: st.tuples(*[arrays(np.uint8, n, elements=st.integers(0, 1))] * 3)))
@settings(max_examples=80, deadline=None)
def test_inner_product_bilinear_and_weight_identity(vs):
    a, b, c = (BitVector.from_bits(v) for v in vs)
    assert gf2.inner_product(a, b) == gf2.inner_product(b, a)
    assert gf2.inner_product(a + b, c) == gf2.inner_product(a, c) ^ gf2.inner_product(b, c)
    assert (a + b).weight() == a.weight() + b.weight() - 2 * a.overlap(b)
    assert 0 <= a.weight() <= len(a)


@pytest.mark.parametrize("rows", [0, 1, 5, 17, 19])
def test_span_chunks_visits_each_element_once(rows):
    rng = np.random.default_rng(rows)
    while True:
        bits = rng.integers(0, 2, size=(rows, 70), dtype=np.uint8)
        M = BitMatrix.from_bits(bits, cols=70)
        if gf2.rank(M) == rows:
            break
    seen = np.concatenate(list(gf2.span_chunks(M, chunk_rows=4)))
    assert seen.shape[0] == 1 << rows
    assert len({row.tobytes() for row in seen}) == 1 << rows


def test_span_chunks_gray_order():
    M = BitMatrix.identity(6)
    seen = np.concatenate(list(gf2.span_chunks(M, chunk_rows=3)))
    steps = gf2.popcount_rows(seen[1:] ^ seen[:-1])
    assert set(steps.tolist()) == {1}


def test_pack_roundtrip_and_hex_layout():
    bits = np.zeros((1, 70), dtype=np.uint8)
    bits[0, [0, 9, 69]] = 1
    words = gf2.pack_bits(bits)
    assert int(words[0, 0]) == (1 << 0) | (1 << 9)
    assert int(words[0, 1]) == 1 << 5
    assert np.array_equal(gf2.unpack_bits(words, 70), bits)
