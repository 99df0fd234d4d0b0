import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparseid.core import (
    Permutation,
    TolerancePolicy,
    as_matrix,
    full_mask,
    identity_mask,
    kronecker,
    mask_from_indices,
    mask_to_indices,
    rank_le_one,
    rel_frobenius_error,
)
from sparseid.transforms import dft


def test_tolerance_policy_validation():
    assert TolerancePolicy().zero_threshold == 1e-12
    with pytest.raises(ValueError):
        TolerancePolicy(zero_threshold=1e-6, relative_tolerance=1e-9)
    with pytest.raises(ValueError):
        TolerancePolicy(zero_threshold=-1.0)


def test_as_matrix_rejects_nonfinite():
    with pytest.raises(ValueError):
        as_matrix([[1.0, np.nan]])
    with pytest.raises(ValueError):
        as_matrix([1.0, 2.0])


def test_kronecker_identity_case():
    M = np.arange(6).reshape(2, 3) + 1j
    assert np.array_equal(kronecker(np.eye(1), M), M)


def test_kronecker_masks_by_hand():
    got = kronecker(full_mask(2), identity_mask(2))
    want = mask_from_indices(4, 4, [(1, 1), (2, 2), (1, 3), (2, 4), (3, 1), (4, 2), (3, 3), (4, 4)])
    assert got.dtype == bool
    assert np.array_equal(got, want)

    got = kronecker(identity_mask(2), full_mask(2))
    want = np.zeros((4, 4), dtype=bool)
    want[:2, :2] = want[2:, 2:] = True
    assert np.array_equal(got, want)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_kronecker_algebra(seed):
    rng = np.random.default_rng(seed)

    def rnd(*shape):
        return rng.normal(size=shape) + 1j * rng.normal(size=shape)

    A, B, C = rnd(2, 3), rnd(2, 2), rnd(3, 2)
    assert np.allclose(kronecker(kronecker(A, B), C), kronecker(A, kronecker(B, C)), rtol=1e-9)
    C2, D = rnd(3, 2), rnd(2, 3)
    lhs = kronecker(A, B) @ kronecker(C2, D)
    rhs = kronecker(A @ C2, B @ D)
    assert rel_frobenius_error(lhs, rhs) <= 1e-9


def test_rank_le_one_examples():
    assert rank_le_one(np.array([[2, 4], [3, 6]]))
    assert not rank_le_one(np.eye(2))
    S = mask_from_indices(4, 4, [(1, 1), (1, 3), (3, 1), (3, 3)])
    assert rank_le_one(dft(4), S)
    assert rank_le_one(np.zeros((3, 3)))


def test_rel_frobenius_error_examples():
    M = np.array([[1, 2], [3, 4j]])
    assert rel_frobenius_error(M, M) == 0
    assert rel_frobenius_error(np.zeros((2, 2)), np.eye(2)) == pytest.approx(1)
    assert rel_frobenius_error(2 * np.eye(2), np.eye(2)) == pytest.approx(1)
    with pytest.raises(ValueError):
        rel_frobenius_error(np.eye(2), np.eye(3))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.data())
def test_mask_round_trip(m, n, data):
    bits = data.draw(st.lists(st.booleans(), min_size=m * n, max_size=m * n))
    S = np.array(bits, dtype=bool).reshape(m, n)
    assert np.array_equal(mask_from_indices(m, n, mask_to_indices(S)), S)
    ones = mask_to_indices(S)
    assert mask_to_indices(mask_from_indices(m, n, ones)) == ones


def test_mask_from_indices_bounds():
    with pytest.raises(ValueError):
        mask_from_indices(2, 2, [(0, 1)])


@settings(max_examples=50, deadline=None)
@given(st.permutations(range(1, 7)), st.permutations(range(1, 7)))
def test_permutation_composition_matches_matrices(a, b):
    P, Q = Permutation(tuple(a)), Permutation(tuple(b))
    assert np.array_equal(P.compose(Q).matrix(), P.matrix() @ Q.matrix())
    assert P.compose(P.inverse()) == Permutation.identity(6)
    x = list("abcdef")
    assert P.apply(x) == list(np.array(x)[np.argmax(P.matrix(), axis=1)])


def test_permutation_from_order_and_kron():
    P = Permutation.from_order([1, 3, 2, 4])
    assert P.apply([1, 2, 3, 4]) == [1, 3, 2, 4]
    big = P.kron_identity_left(2)
    assert np.array_equal(big.matrix(), np.kron(np.eye(2), P.matrix()))
    with pytest.raises(ValueError):
        Permutation((1, 1, 2))
