"""Hierarchical recovery of butterfly-supported factors from their product."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from typing import Sequence

import numpy as np

from .core import DEFAULT_TOL, Permutation, TolerancePolicy, as_matrix, rank_le_one_dense, rel_frobenius_error
from .emd import ScalingChain, chain_scale_equivalent, split_rank_one
from .supports import butterfly_support, lift_supports, partial_product_support, permute_columns
from .transforms import log2_exact


class TreeError(ValueError):
    pass


class ModelMismatchError(ValueError):
    """The input is not a product of factors with the requested supports."""


@dataclass(frozen=True)
class PartitioningTree:
    """Binary tree over the consecutive range ``lo..hi``.

    The left child always holds the larger indices.
    """

    lo: int
    hi: int
    left: "PartitioningTree | None" = None
    right: "PartitioningTree | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    @property
    def split(self) -> int:
        """Largest index of the right child."""
        return self.right.hi

    def to_nested(self):
        if self.is_leaf:
            return self.lo
        return [self.left.to_nested(), self.right.to_nested()]

    def __str__(self) -> str:
        if self.is_leaf:
            return str(self.lo)
        return f"({self.left} {self.right})"


def _from_nested(desc) -> PartitioningTree:
    if isinstance(desc, bool):
        raise TreeError(f"invalid tree node {desc!r}")
    if isinstance(desc, int):
        return PartitioningTree(desc, desc)
    if not isinstance(desc, (list, tuple)) or len(desc) != 2:
        raise TreeError(f"internal nodes must be [left, right] pairs, got {desc!r}")
    left, right = _from_nested(desc[0]), _from_nested(desc[1])
    if left.lo != right.hi + 1:
        raise TreeError(
            f"left child {left.lo}..{left.hi} must sit directly above right child {right.lo}..{right.hi}"
        )
    return PartitioningTree(right.lo, left.hi, left, right)


def _build(kind: str, p: int, q: int) -> PartitioningTree:
    if p == q:
        return PartitioningTree(p, q)
    if kind == "left_comb":
        split = p
    elif kind == "right_comb":
        split = q - 1
    else:
        split = p + (q - p + 1) // 2 - 1
    return PartitioningTree(p, q, _build(kind, split + 1, q), _build(kind, p, split))


TREE_KINDS = ("left_comb", "right_comb", "balanced")


def make_tree(spec, p: int, q: int) -> PartitioningTree:
    """Partitioning tree over ``p..q``.

    ``spec`` is ``"left_comb"`` (right children are leaves), ``"right_comb"``
    (left children are leaves), ``"balanced"``, or an explicit nested
    description where a leaf is an int and an internal node is
    ``[left, right]``.
    """
    if p > q:
        raise TreeError(f"empty range {p}..{q}")
    if isinstance(spec, str):
        kind = spec.replace("-", "_")
        if kind not in TREE_KINDS:
            raise TreeError(f"unknown tree kind {spec!r}")
        return _build(kind, p, q)
    tree = _from_nested(spec)
    if (tree.lo, tree.hi) != (p, q):
        raise TreeError(f"tree covers {tree.lo}..{tree.hi}, expected {p}..{q}")
    return tree


def all_trees(p: int, q: int) -> list[PartitioningTree]:
    """Every partitioning tree of ``p..q``."""
    if p == q:
        return [PartitioningTree(p, q)]
    return [
        PartitioningTree(p, q, left, right)
        for split in range(p, q)
        for left in all_trees(split + 1, q)
        for right in all_trees(p, split)
    ]


class Mode(str, Enum):
    EXACT = "exact"
    SVD = "svd"


@dataclass(frozen=True)
class LevelReport:
    top: int
    bottom: int
    split: int
    residual: float

    def to_json(self) -> dict:
        return {"node": [self.bottom, self.top], "split": self.split, "residual": self.residual}


@dataclass(frozen=True)
class FactorChain:
    """Factors ordered outermost first, ``(X_q, ..., X_p)``."""

    factors: tuple[np.ndarray, ...]
    levels: tuple[LevelReport, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def __getitem__(self, i):
        return self.factors[i]

    def product(self) -> np.ndarray:
        return reduce(np.matmul, self.factors)


def _best_rank_one(A: np.ndarray) -> np.ndarray:
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    return s[0] * np.outer(U[:, 0], Vh[0])


def _split_level(Z, q, ell, p, L, mode, tol, inner_perm):
    left = partial_product_support(q, ell + 1, L)
    right = partial_product_support(ell, p, L)
    if p == 1 and inner_perm is not None:
        right = permute_columns(right, inner_perm)
    supports = lift_supports(left, right.T)
    N = Z.shape[0]
    H2 = np.zeros((N, N), dtype=np.complex128)
    H1t = np.zeros((N, N), dtype=np.complex128)
    covered = np.zeros((N, N), dtype=bool)
    for i, s in enumerate(supports):
        if not s:
            continue
        rows = np.array(sorted(s.rows)) - 1
        cols = np.array(sorted(s.cols)) - 1
        covered[np.ix_(rows, cols)] = True
        block = Z[np.ix_(rows, cols)]
        if mode is Mode.SVD:
            block = _best_rank_one(block)
        elif not rank_le_one_dense(block, tol):
            raise ModelMismatchError(
                f"block {i + 1} at level {p}..{q} (split {ell}) is not of rank one"
            )
        u, v = split_rank_one(block, tol)
        H2[rows, i] = u
        H1t[i, cols] = v
    if mode is Mode.EXACT:
        outside = np.linalg.norm(Z[~covered])
        if outside > tol.relative_tolerance * max(np.linalg.norm(Z), tol.zero_threshold):
            raise ModelMismatchError(f"input has mass outside the level {p}..{q} supports")
    residual = rel_frobenius_error(H2 @ H1t, Z, tol)
    return H2, H1t, residual


def hierarchical_factorize(Z, tree: PartitioningTree, L: int, mode="exact",
                           tol: TolerancePolicy = DEFAULT_TOL,
                           inner_perm: Permutation | None = None) -> FactorChain:
    """Recover ``(X_q, ..., X_p)`` from ``Z = X_q ... X_p`` following ``tree``.

    Each internal node splits its product in two with the partial-product
    supports on either side of the split index, one rank-one block per inner
    index.  ``inner_perm`` right-multiplies the support of ``X_1`` (use the
    bit-reversal permutation for the DFT).
    """
    Z = as_matrix(Z)
    mode = Mode(mode)
    N = 2**L
    if Z.shape != (N, N):
        raise ValueError(f"expected a {N}x{N} matrix for L={L}, got {Z.shape}")
    if not 1 <= tree.lo <= tree.hi <= L:
        raise TreeError(f"tree range {tree.lo}..{tree.hi} outside 1..{L}")
    if inner_perm is not None and inner_perm.n != N:
        raise ValueError("inner permutation has the wrong size")

    levels: list[LevelReport] = []

    def recurse(M, node):
        if node.is_leaf:
            return [M]
        ell = node.split
        H2, H1t, residual = _split_level(M, node.hi, ell, node.lo, L, mode, tol, inner_perm)
        levels.append(LevelReport(node.hi, node.lo, ell, residual))
        return recurse(H2, node.left) + recurse(H1t, node.right)

    factors = recurse(Z, tree)
    return FactorChain(tuple(factors), tuple(levels))


def verify_s_unique_recovery(original: Sequence, recovered: Sequence,
                             tol: TolerancePolicy = DEFAULT_TOL) -> ScalingChain | None:
    return chain_scale_equivalent(list(original), list(recovered), tol)


def random_butterfly_chain(L: int, rng: np.random.Generator) -> list[np.ndarray]:
    """``[X_L, ..., X_1]`` with ``supp(X_l) = S^l`` and unit-modulus entries."""
    N = 2**L
    chain = []
    for ell in range(L, 0, -1):
        S = butterfly_support(ell, L)
        X = np.zeros((N, N), dtype=np.complex128)
        X[S] = np.exp(2j * np.pi * rng.random(int(S.sum())))
        chain.append(X)
    return chain


def dft_butterfly_chain(N: int) -> list[np.ndarray]:
    """``[F_L, ..., F_2, F_1 R_N]``."""
    from .transforms import bit_reversal_perm, butterfly_factors

    L = log2_exact(N)
    chain = butterfly_factors(L)
    chain[-1] = chain[-1] @ bit_reversal_perm(N).matrix()
    return chain
