"""Shared numeric and combinatorial building blocks.

Matrices are plain ``numpy`` arrays (``complex128`` for values, ``bool`` for
support masks).  All public index conventions are 1-based; the helpers here
convert between 1-based index sets and 0-based array storage.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class TolerancePolicy:
    """Thresholds used for every floating-point decision in the package."""

    zero_threshold: float = 1e-12
    relative_tolerance: float = 1e-9

    def __post_init__(self):
        if self.zero_threshold < 0 or self.relative_tolerance < 0:
            raise ValueError("tolerances must be nonnegative")
        if self.zero_threshold > self.relative_tolerance:
            raise ValueError("zero_threshold must not exceed relative_tolerance")


DEFAULT_TOL = TolerancePolicy()


def as_matrix(M) -> np.ndarray:
    """Validate and convert ``M`` to a finite 2-D complex array."""
    A = np.array(M, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"expected a nonempty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def as_mask(S) -> np.ndarray:
    S = np.asarray(S)
    if S.ndim != 2:
        raise ValueError(f"expected a 2-D mask, got shape {S.shape}")
    return S.astype(bool)


def mask_from_indices(rows: int, cols: int, ones: Iterable[Sequence[int]]) -> np.ndarray:
    """Binary mask of shape ``(rows, cols)`` from 1-based ``(k, l)`` pairs."""
    S = np.zeros((rows, cols), dtype=bool)
    for k, l in ones:
        if not (1 <= k <= rows and 1 <= l <= cols):
            raise ValueError(f"index ({k}, {l}) outside a {rows}x{cols} mask")
        S[k - 1, l - 1] = True
    return S


def mask_to_indices(S) -> set[tuple[int, int]]:
    """1-based index set of the ones of a mask."""
    ks, ls = np.nonzero(as_mask(S))
    return {(int(k) + 1, int(l) + 1) for k, l in zip(ks, ls)}


def support(M, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Entries of magnitude above ``zero_threshold``."""
    return np.abs(np.asarray(M)) > tol.zero_threshold


def full_mask(n: int, m: int | None = None) -> np.ndarray:
    """The all-ones mask ``U_n`` (or ``n x m``)."""
    return np.ones((n, n if m is None else m), dtype=bool)


def identity_mask(n: int) -> np.ndarray:
    return np.eye(n, dtype=bool)


def kronecker(A, B):
    """Kronecker product of two masks (result is a mask) or two matrices."""
    A, B = np.asarray(A), np.asarray(B)
    if A.dtype == bool and B.dtype == bool:
        return np.kron(A.astype(np.uint8), B.astype(np.uint8)).astype(bool)
    return np.kron(A.astype(np.complex128), B.astype(np.complex128))


def restrict(M, S) -> np.ndarray:
    """Dense submatrix of ``M`` on the row and column supports of mask ``S``.

    Cells of that rectangle which lie outside ``S`` are set to zero.
    """
    M = np.asarray(M)
    S = as_mask(S)
    if S.shape != M.shape:
        raise ValueError(f"mask shape {S.shape} does not fit matrix shape {M.shape}")
    rows = np.flatnonzero(S.any(axis=1))
    cols = np.flatnonzero(S.any(axis=0))
    sub = np.where(S, M, 0)[np.ix_(rows, cols)]
    return sub


def rank_le_one_dense(A, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    if A.size == 0:
        return True
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] <= tol.zero_threshold:
        return True
    return len(s) < 2 or s[1] <= tol.relative_tolerance * s[0]


def rank_le_one(M, S=None, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """Whether ``M`` restricted to mask ``S`` has numerical rank at most one.

    The decision is ``sigma_2 <= relative_tolerance * sigma_1``; an
    all-zero restriction counts as rank zero.
    """
    M = np.asarray(M)
    if S is None:
        S = np.ones(M.shape, dtype=bool)
    return rank_le_one_dense(restrict(M, S), tol)


def rel_frobenius_error(A, B, tol: TolerancePolicy = DEFAULT_TOL) -> float:
    """``||A - B||_F / max(||B||_F, zero_threshold)``."""
    A, B = np.asarray(A), np.asarray(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return float(np.linalg.norm(A - B) / max(np.linalg.norm(B), tol.zero_threshold))


@dataclass(frozen=True)
class Permutation:
    """Bijection of ``{1..n}``; ``image[j-1]`` is the destination of index ``j``.

    The induced matrix ``P`` has ``P[image[j], j] = 1``, so ``(P x)`` moves
    entry ``x_j`` to position ``image[j]``.
    """

    image: tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(i) for i in self.image)
        if sorted(image) != list(range(1, len(image) + 1)):
            raise ValueError(f"not a permutation of 1..{len(image)}: {image}")
        object.__setattr__(self, "image", image)

    @property
    def n(self) -> int:
        return len(self.image)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_order(cls, order: Sequence[int]) -> "Permutation":
        """Permutation whose action on ``[1..n]`` yields ``order``."""
        image = [0] * len(order)
        for pos, src in enumerate(order, start=1):
            image[src - 1] = pos
        return cls(tuple(image))

    def apply(self, seq: Sequence) -> list:
        """The sequence ``P x``: entry ``j`` of ``seq`` lands at ``image[j]``."""
        if len(seq) != self.n:
            raise ValueError("length mismatch")
        out = [None] * self.n
        for j, dest in enumerate(self.image):
            out[dest - 1] = seq[j]
        return out

    def compose(self, other: "Permutation") -> "Permutation":
        """``self . other``, matching the matrix product ``P_self @ P_other``."""
        if other.n != self.n:
            raise ValueError("size mismatch")
        return Permutation(tuple(self.image[d - 1] for d in other.image))

    def inverse(self) -> "Permutation":
        return Permutation.from_order(self.image)

    def matrix(self) -> np.ndarray:
        P = np.zeros((self.n, self.n))
        P[np.array(self.image) - 1, np.arange(self.n)] = 1.0
        return P

    def kron_identity_left(self, k: int) -> "Permutation":
        """The permutation ``I_k (x) P``."""
        n = self.n
        return Permutation(tuple(b * n + d for b in range(k) for d in self.image))
