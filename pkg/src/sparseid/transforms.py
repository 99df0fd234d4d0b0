"""Named transform matrices and the butterfly structure of the DFT."""

from __future__ import annotations

from enum import Enum

import numpy as np

from .core import Permutation


class TransformKind(str, Enum):
    DFT = "dft"
    DCT2 = "dct2"
    DST2 = "dst2"
    HADAMARD = "hadamard"


def log2_exact(N: int) -> int:
    """``L`` with ``N == 2**L``; raises for anything else."""
    N = int(N)
    if N < 1 or N & (N - 1):
        raise ValueError(f"size must be a power of two, got {N}")
    return N.bit_length() - 1


def omega_powers(N: int, exponents) -> np.ndarray:
    # Each power evaluated directly from its exponent to avoid drift.
    e = np.asarray(exponents) % N
    return np.exp(-2j * np.pi * e / N)


def dft(N: int) -> np.ndarray:
    k = np.arange(N)
    return omega_powers(N, np.outer(k, k))


def dct2(N: int) -> np.ndarray:
    k = np.arange(1, N + 1)[:, None]
    l = np.arange(1, N + 1)[None, :]
    return np.cos(np.pi / N * (l - 0.5) * (k - 1)).astype(np.complex128)


def dst2(N: int) -> np.ndarray:
    k = np.arange(1, N + 1)[:, None]
    l = np.arange(1, N + 1)[None, :]
    return np.sin(np.pi / N * (l - 0.5) * k).astype(np.complex128)


def hadamard(N: int) -> np.ndarray:
    L = log2_exact(N)
    H = np.ones((1, 1))
    for _ in range(L):
        H = np.block([[H, H], [H, -H]])
    return H.astype(np.complex128)


def gen_transform(kind, N: int) -> np.ndarray:
    """The ``N x N`` DFT, DCT-II, DST-II or Hadamard matrix."""
    kind = TransformKind(kind)
    if N < 1:
        raise ValueError(f"size must be positive, got {N}")
    if kind is TransformKind.DFT:
        return dft(N)
    if kind is TransformKind.DCT2:
        return dct2(N)
    if kind is TransformKind.DST2:
        return dst2(N)
    return hadamard(N)


def butterfly_block(n: int) -> np.ndarray:
    """``B_n = [[I, A], [I, -A]]`` with ``A = diag(1, w_n, ..., w_n^(n/2-1))``."""
    h = n // 2
    A = np.diag(omega_powers(n, np.arange(h)))
    I = np.eye(h)
    return np.block([[I, A], [I, -A]])


def butterfly_factor(ell: int, L: int) -> np.ndarray:
    """Butterfly factor ``F_ell`` of ``DFT_{2^L}``: ``I_{N/2^ell} (x) B_{2^ell}``."""
    if not 1 <= ell <= L:
        raise ValueError(f"ell must lie in [1, {L}], got {ell}")
    N = 2**L
    return np.kron(np.eye(N // 2**ell), butterfly_block(2**ell))


def butterfly_factors(L: int) -> list[np.ndarray]:
    """``[F_L, ..., F_1]`` so that ``DFT_N = F_L ... F_1 R_N``."""
    return [butterfly_factor(ell, L) for ell in range(L, 0, -1)]


def odd_even_perm(N: int) -> Permutation:
    """``P_N``: sorts the odd indices first, then the even ones."""
    if N < 2 or N % 2:
        raise ValueError(f"N must be a positive even integer, got {N}")
    order = list(range(1, N + 1, 2)) + list(range(2, N + 1, 2))
    return Permutation.from_order(order)


def bit_reversal_perm(N: int) -> Permutation:
    """``R_N = Q_1 Q_2 ... Q_L`` with ``Q_ell = I_{N/2^ell} (x) P_{2^ell}``."""
    L = log2_exact(N)
    R = Permutation.identity(N)
    for ell in range(1, L + 1):
        Q = odd_even_perm(2**ell).kron_identity_left(N // 2**ell)
        R = R.compose(Q)
    return R
