import numpy as np
import pytest
from scipy.linalg import block_diag

from sparseid.core import Permutation, rel_frobenius_error, support
from sparseid.transforms import (
    TransformKind,
    bit_reversal_perm,
    butterfly_block,
    butterfly_factor,
    butterfly_factors,
    dft,
    gen_transform,
    odd_even_perm,
)

SIZES = [2**L for L in range(1, 11)]


def test_hadamard_2():
    assert np.array_equal(gen_transform("hadamard", 2), [[1, 1], [1, -1]])


def test_hadamard_requires_power_of_two():
    with pytest.raises(ValueError):
        gen_transform(TransformKind.HADAMARD, 6)


def test_dft_4_entry():
    assert abs(gen_transform("dft", 4)[1, 1] - (-1j)) < 1e-15


def test_dct2_2():
    h = np.sqrt(2) / 2
    assert np.allclose(gen_transform("dct2", 2), [[1, 1], [h, -h]], atol=1e-15)


def test_dst2_matches_formula():
    N = 8
    k, l = np.meshgrid(np.arange(1, N + 1), np.arange(1, N + 1), indexing="ij")
    want = np.sin(np.pi / N * (l - 0.5) * k)
    assert np.allclose(gen_transform("dst2", N), want, atol=1e-14)


@pytest.mark.parametrize("kind", ["dct2", "dst2", "hadamard"])
def test_real_kinds_have_zero_imaginary_part(kind):
    assert not np.any(gen_transform(kind, 16).imag)


def test_butterfly_factor_examples():
    assert np.array_equal(butterfly_factor(1, 1), [[1, 1], [1, -1]])
    want = np.array([[1, 0, 1, 0], [0, 1, 0, -1j], [1, 0, -1, 0], [0, 1, 0, 1j]])
    assert np.allclose(butterfly_factor(2, 2), want, atol=1e-15)
    block = np.zeros((4, 4), dtype=bool)
    block[:2, :2] = block[2:, 2:] = True
    assert np.array_equal(support(butterfly_factor(1, 2)), block)
    with pytest.raises(ValueError):
        butterfly_factor(3, 2)


def test_odd_even_perm():
    assert odd_even_perm(4).apply([1, 2, 3, 4]) == [1, 3, 2, 4]
    assert odd_even_perm(2) == Permutation.identity(2)
    assert odd_even_perm(8).apply(list(range(1, 9))) == [1, 3, 5, 7, 2, 4, 6, 8]
    with pytest.raises(ValueError):
        odd_even_perm(5)


def test_bit_reversal_perm():
    assert bit_reversal_perm(2) == Permutation.identity(2)
    assert bit_reversal_perm(4).apply([1, 2, 3, 4]) == [1, 3, 2, 4]
    assert bit_reversal_perm(8).apply(list(range(1, 9))) == [1, 5, 3, 7, 2, 6, 4, 8]
    with pytest.raises(ValueError):
        bit_reversal_perm(12)


@pytest.mark.parametrize("N", SIZES)
def test_bit_reversal_matches_binary_reversal_and_is_involution(N):
    L = N.bit_length() - 1
    R = bit_reversal_perm(N)
    want = [int(format(j, f"0{L}b")[::-1], 2) + 1 if L else 1 for j in range(N)]
    assert R.apply(list(range(1, N + 1))) == want
    assert R.compose(R) == Permutation.identity(N)


@pytest.mark.parametrize("N", SIZES[1:])
def test_recursion_identity(N):
    P = odd_even_perm(N).matrix()
    half = dft(N // 2)
    assert rel_frobenius_error(butterfly_block(N) @ block_diag(half, half) @ P, dft(N)) <= 1e-10


@pytest.mark.parametrize("N", SIZES[1:])
def test_full_butterfly_identity(N):
    L = N.bit_length() - 1
    prod = np.linalg.multi_dot(butterfly_factors(L) + [bit_reversal_perm(N).matrix()])
    assert rel_frobenius_error(prod, dft(N)) <= 1e-10
