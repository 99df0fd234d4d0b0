"""Exact matrix decomposition with fixed rank-one supports.

:func:`emd_complete` recovers the rank-one contributions ``C_1..C_r`` of an
observed ``Z = C_1 + ... + C_r`` by propagating the entries of ``Z`` that are
covered by a single support, using 2x2 cross-ratios inside each contribution
and subtraction from ``Z`` across contributions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .core import DEFAULT_TOL, TolerancePolicy, as_matrix, rank_le_one_dense
from .supports import RankOneSupportTuple


class NotRankOneError(ValueError):
    """A contribution that should be rank one is not."""


@dataclass(frozen=True)
class ContributionTuple:
    """``r`` partial ``m x n`` matrices tied to their governing supports.

    ``values[i]`` holds the known entries of contribution ``i`` (zero outside
    ``S_i``); ``missing[i]`` flags entries of ``S_i`` not yet determined.
    """

    supports: RankOneSupportTuple
    values: np.ndarray
    missing: np.ndarray

    @property
    def r(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape[1:]

    def is_complete(self) -> bool:
        return not self.missing.any()

    def matrices(self) -> list[np.ndarray]:
        """Contributions with ``nan`` at missing cells."""
        out = self.values.copy()
        out[self.missing] = np.nan
        return list(out)

    def to_json(self) -> list[dict]:
        from .io import matrix_to_json

        out = []
        for s, V, miss in zip(self.supports, self.values, self.missing):
            out.append(
                {
                    "support": {"rows": sorted(s.rows), "cols": sorted(s.cols)},
                    "matrix": matrix_to_json(V, missing=miss),
                }
            )
        return out

    @classmethod
    def from_matrices(cls, supports: RankOneSupportTuple, mats) -> "ContributionTuple":
        values = np.array([as_matrix(M) for M in mats])
        return cls(supports, values, np.zeros(values.shape, dtype=bool))


class Outcome(str, Enum):
    COMPLETE = "complete"
    INCOMPATIBLE = "incompatible"
    STALLED = "stalled"


@dataclass(frozen=True)
class EmdOutcome:
    status: Outcome
    contributions: ContributionTuple
    cell: tuple[int, int] | None = None

    @property
    def complete(self) -> bool:
        return self.status is Outcome.COMPLETE

    def to_json(self) -> dict:
        obj: dict = {"outcome": self.status.value}
        if self.cell is not None:
            obj["cell"] = list(self.cell)
        obj["contributions"] = self.contributions.to_json()
        return obj


def _initial_state(Z: np.ndarray, S: RankOneSupportTuple):
    m, n = Z.shape
    cover = np.zeros((m, n), dtype=int)
    masks = S.masks()
    for M in masks:
        cover += M
    vals, miss = [], []
    for M in masks:
        observable = M & (cover == 1)
        vals.append(np.where(observable, Z, 0).tolist())
        miss.append((M & ~observable).tolist())
    return vals, miss


def _complete_inside(vals, miss, S: RankOneSupportTuple, tol: TolerancePolicy) -> int:
    """One sweep of 2x2 cross-ratio completion; returns the number of cells filled."""
    filled = 0
    for i, s in enumerate(S):
        V, M = vals[i], miss[i]
        rows = [k - 1 for k in sorted(s.rows)]
        cols = [l - 1 for l in sorted(s.cols)]
        for k1, k2 in combinations(rows, 2):
            if not any(M[k1][l] or M[k2][l] for l in cols):
                continue
            for l1, l2 in combinations(cols, 2):
                # a1 a2 / a4 a3 in row-major order, opposite corners differ by 2
                quad = ((k1, l1), (k1, l2), (k2, l2), (k2, l1))
                holes = [t for t, (k, l) in enumerate(quad) if M[k][l]]
                if len(holes) != 1:
                    continue
                t = holes[0]
                ko, lo = quad[(t + 2) % 4]
                if abs(V[ko][lo]) <= tol.zero_threshold:
                    continue
                (ka, la), (kb, lb) = quad[(t + 1) % 4], quad[(t + 3) % 4]
                k, l = quad[t]
                V[k][l] = V[ka][la] * V[kb][lb] / V[ko][lo]
                M[k][l] = False
                filled += 1
    return filled


def _first_incompatible(Z, vals, miss, tol: TolerancePolicy):
    m, n = Z.shape
    r = len(vals)
    for k in range(m):
        for l in range(n):
            if any(miss[i][k][l] for i in range(r)):
                continue
            z = Z[k, l]
            if abs(z - sum(vals[i][k][l] for i in range(r))) > tol.relative_tolerance * (1 + abs(z)):
                return (k + 1, l + 1)
    return None


def _complete_across(Z, vals, miss) -> int:
    m, n = Z.shape
    r = len(vals)
    filled = 0
    for k in range(m):
        for l in range(n):
            holes = [i for i in range(r) if miss[i][k][l]]
            if len(holes) != 1:
                continue
            i = holes[0]
            vals[i][k][l] = Z[k, l] - sum(vals[j][k][l] for j in range(r) if j != i)
            miss[i][k][l] = False
            filled += 1
    return filled


def _rank_violation(V: np.ndarray, s, tol: TolerancePolicy):
    rows = sorted(s.rows)
    cols = sorted(s.cols)
    sub = V[np.ix_([k - 1 for k in rows], [l - 1 for l in cols])]
    if rank_le_one_dense(sub, tol):
        return None
    scale = np.abs(sub).max() ** 2
    for a, b in combinations(range(len(rows)), 2):
        for c, d in combinations(range(len(cols)), 2):
            minor = sub[a, c] * sub[b, d] - sub[a, d] * sub[b, c]
            if abs(minor) > tol.relative_tolerance * scale:
                return (rows[b], cols[d])
    return (rows[0], cols[0])


def emd_complete(Z, S: RankOneSupportTuple, tol: TolerancePolicy = DEFAULT_TOL) -> EmdOutcome:
    """Run the completion algorithm on ``Z`` with rank-one supports ``S``.

    Each pass fills what it can inside every contribution, checks fully known
    cells against ``Z`` and then fills cells missing in exactly one
    contribution.  The loop stops at the first pass that fills nothing.
    """
    Z = as_matrix(Z)
    if Z.shape != (S.m, S.n):
        raise ValueError(f"matrix shape {Z.shape} does not match supports ({S.m}, {S.n})")
    vals, miss = _initial_state(Z, S)

    def snapshot():
        return ContributionTuple(
            S, np.array(vals, dtype=np.complex128).reshape(S.r, S.m, S.n),
            np.array(miss, dtype=bool).reshape(S.r, S.m, S.n),
        )

    while True:
        filled = _complete_inside(vals, miss, S, tol)
        bad = _first_incompatible(Z, vals, miss, tol)
        if bad is not None:
            return EmdOutcome(Outcome.INCOMPATIBLE, snapshot(), bad)
        filled += _complete_across(Z, vals, miss)
        if not filled:
            break

    C = snapshot()
    if not C.is_complete():
        return EmdOutcome(Outcome.STALLED, C)
    for V, s in zip(C.values, S):
        if s:
            bad = _rank_violation(V, s, tol)
            if bad is not None:
                return EmdOutcome(Outcome.INCOMPATIBLE, C, bad)
    return EmdOutcome(Outcome.COMPLETE, C)


def _stack(C) -> np.ndarray:
    if isinstance(C, ContributionTuple):
        if not C.is_complete():
            raise ValueError("contribution tuple has missing cells")
        return C.values
    mats = np.asarray(C, dtype=np.complex128)
    if mats.ndim != 3:
        raise ValueError("expected a sequence of equally sized matrices")
    if np.isnan(mats).any():
        raise ValueError("contribution tuple has missing cells")
    return mats


def sum_contributions(C) -> np.ndarray:
    """The summation operator ``(C_1, ..., C_r) -> C_1 + ... + C_r``."""
    return _stack(C).sum(axis=0)


def split_rank_one(C: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Vectors ``u, v`` with ``outer(u, v) == C`` by the first-pivot rule.

    ``u`` is the first column of ``C`` with a nonzero entry and ``v`` is the
    row through the first nonzero entry of ``u``, divided by that entry.
    """
    m, n = C.shape
    nz = np.abs(C) > tol.zero_threshold
    if not nz.any():
        return np.zeros(m, dtype=np.complex128), np.zeros(n, dtype=np.complex128)
    rows = np.flatnonzero(nz.any(axis=1))
    cols = np.flatnonzero(nz.any(axis=0))
    if not rank_le_one_dense(C[np.ix_(rows, cols)], tol):
        raise NotRankOneError("contribution is not of rank at most one")
    l0 = cols[0]
    u = C[:, l0].copy()
    k0 = np.flatnonzero(np.abs(u) > tol.zero_threshold)[0]
    v = C[k0, :] / u[k0]
    return u, v


def contributions_to_factors(C, tol: TolerancePolicy = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Factors ``X (m x r)`` and ``Y (n x r)`` with ``X[:, i] Y[:, i]^T = C_i``."""
    mats = _stack(C)
    r, m, n = mats.shape
    X = np.zeros((m, r), dtype=np.complex128)
    Y = np.zeros((n, r), dtype=np.complex128)
    for i, Ci in enumerate(mats):
        X[:, i], Y[:, i] = split_rank_one(Ci, tol)
    return X, Y


# --- equivalence checks -----------------------------------------------------


def _pivot(x: np.ndarray) -> int:
    a = np.abs(x)
    return int(np.flatnonzero(a >= 0.5 * a.max())[0])


def _normalize_pair(x, y, tol: TolerancePolicy) -> np.ndarray:
    """Representative of ``{(d x, y / d)}`` as one concatenated vector."""
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    nx = np.abs(x).max(initial=0) > tol.zero_threshold
    ny = np.abs(y).max(initial=0) > tol.zero_threshold
    if nx:
        d = x[_pivot(x)]
        x, y = x / d, y * d
    elif ny:
        x, y = np.zeros_like(x), y / y[_pivot(y)]
    else:
        x, y = np.zeros_like(x), np.zeros_like(y)
    if nx and not ny:
        y = np.zeros_like(y)
    return np.concatenate([x, y])


def _close(a, b, tol: TolerancePolicy) -> bool:
    scale = max(np.linalg.norm(a), np.linalg.norm(b), tol.zero_threshold)
    return bool(np.linalg.norm(a - b) <= tol.relative_tolerance * scale)


def _check_pair_shapes(X, Y, X2, Y2):
    X, Y, X2, Y2 = (np.asarray(A, dtype=np.complex128) for A in (X, Y, X2, Y2))
    if X.shape != X2.shape or Y.shape != Y2.shape or X.shape[1] != Y.shape[1]:
        raise ValueError("factor pairs have mismatched shapes")
    return X, Y, X2, Y2


def pair_scale_equivalent(X, Y, X2, Y2, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """Whether ``X2 = X D`` and ``Y2 = Y D^-1`` for some invertible diagonal ``D``."""
    X, Y, X2, Y2 = _check_pair_shapes(X, Y, X2, Y2)
    return all(
        _close(_normalize_pair(X[:, i], Y[:, i], tol), _normalize_pair(X2[:, i], Y2[:, i], tol), tol)
        for i in range(X.shape[1])
    )


def pair_perm_scale_equivalent(X, Y, X2, Y2, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """Whether the pairs agree up to a column permutation and reciprocal scaling."""
    X, Y, X2, Y2 = _check_pair_shapes(X, Y, X2, Y2)
    r = X.shape[1]
    a = [_normalize_pair(X[:, i], Y[:, i], tol) for i in range(r)]
    b = [_normalize_pair(X2[:, i], Y2[:, i], tol) for i in range(r)]
    adjacency = np.array([[_close(u, v, tol) for v in b] for u in a], dtype=np.int8)
    match = maximum_bipartite_matching(csr_matrix(adjacency), perm_type="column")
    return bool((match >= 0).all())


@dataclass(frozen=True)
class ScalingChain:
    """Diagonals ``D_1..D_{L-1}``; ``D_0`` and ``D_L`` are identities."""

    diagonals: tuple[np.ndarray, ...]

    def to_json(self) -> list:
        return [[[float(z.real), float(z.imag)] for z in d] for d in self.diagonals]


def chain_scale_equivalent(chain: Sequence, chain2: Sequence,
                           tol: TolerancePolicy = DEFAULT_TOL) -> ScalingChain | None:
    """Witness ``D`` with ``chain2[l] = D_l^-1 chain[l] D_(l-1)``, or ``None``.

    Chains are ordered outermost first, ``(X_L, ..., X_1)``.  Scales are
    forced layer by layer starting from ``D_L = I``.
    """
    if len(chain) != len(chain2):
        raise ValueError("chains have different lengths")
    chain = [as_matrix(X) for X in chain]
    chain2 = [as_matrix(X) for X in chain2]
    for A, B in zip(chain, chain2):
        if A.shape != B.shape:
            raise ValueError(f"factor shapes differ: {A.shape} vs {B.shape}")
    for A, B in zip(chain, chain[1:]):
        if A.shape[1] != B.shape[0]:
            raise ValueError("chain factors do not conform")

    L = len(chain)
    d_out = np.ones(chain[0].shape[0], dtype=np.complex128)
    diagonals = []
    for pos, (A, B) in enumerate(zip(chain, chain2)):
        innermost = pos == L - 1
        if innermost:
            d_in = np.ones(A.shape[1], dtype=np.complex128)
        else:
            d_in = np.ones(A.shape[1], dtype=np.complex128)
            for j in range(A.shape[1]):
                col = np.abs(A[:, j])
                if col.max(initial=0) <= tol.zero_threshold:
                    continue
                k = int(np.argmax(col))
                d_in[j] = B[k, j] * d_out[k] / A[k, j]
            if (np.abs(d_in) <= tol.zero_threshold).any():
                return None
        expected = A * d_in[None, :] / d_out[:, None]
        scale = max(np.linalg.norm(B), tol.zero_threshold)
        if np.linalg.norm(B - expected) > tol.relative_tolerance * scale:
            return None
        if not innermost:
            diagonals.append(d_in)
        d_out = d_in
    # collected as D_{L-1}, ..., D_1
    return ScalingChain(tuple(reversed(diagonals)))
