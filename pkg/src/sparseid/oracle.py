"""Exhaustive search for rank-one partitions of a matrix support.

A partition is an ``r``-tuple of rectangles ``R_i x C_i`` (``|R_i| <= a``,
``|C_i| <= b``) that tile ``supp(Z)`` exactly, such that ``Z`` restricted to
every rectangle has rank at most one.  Uniqueness of that tiling up to
reordering is the support-identifiability half of the uniqueness question;
:func:`cross_check_uniqueness` adds the fixed-support half.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from itertools import combinations

import numpy as np

from .core import DEFAULT_TOL, TolerancePolicy, as_matrix, rank_le_one_dense, support
from .emd import emd_complete
from .supports import RankOneSupport, RankOneSupportTuple, SupportFamilySpec, pairwise_disjoint

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**7


class SearchBudgetExceeded(RuntimeError):
    pass


class Status(str, Enum):
    UNIQUE = "unique"
    MULTIPLE = "multiple"
    NONE = "none"


@dataclass(frozen=True)
class PartitionCertificate:
    status: Status
    partitions: tuple[RankOneSupportTuple, ...]
    nodes: int = 0

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "count": len(self.partitions),
            "nodes": self.nodes,
            "partitions": [p.to_json()["supports"] for p in self.partitions],
        }


@dataclass(frozen=True)
class _Candidate:
    bits: int
    rows: tuple[int, ...]
    cols: tuple[int, ...]


def _proportionality_classes(V: np.ndarray, tol: TolerancePolicy) -> list[list[int]]:
    """Group row indices of ``V`` (no zero entries) into collinear classes."""
    classes: list[tuple[np.ndarray, list[int]]] = []
    for k, v in enumerate(V):
        w = v / v[0]
        for rep, members in classes:
            if np.linalg.norm(w - rep) <= tol.relative_tolerance * max(np.linalg.norm(w), np.linalg.norm(rep)):
                members.append(k)
                break
        else:
            classes.append((w, [k]))
    return [members for _, members in classes]


def _candidates(Z: np.ndarray, a: int, b: int, tol: TolerancePolicy) -> list[_Candidate]:
    m, n = Z.shape
    nz = support(Z, tol)
    out = []
    for width in range(1, b + 1):
        for cols in combinations(range(n), width):
            eligible = np.flatnonzero(nz[:, cols].all(axis=1))
            if not len(eligible):
                continue
            block = Z[np.ix_(eligible, cols)]
            for members in _proportionality_classes(block, tol):
                rows_all = eligible[members]
                for height in range(1, min(a, len(rows_all)) + 1):
                    for rows in combinations(rows_all.tolist(), height):
                        if not rank_le_one_dense(Z[np.ix_(rows, cols)], tol):
                            continue
                        bits = 0
                        for k in rows:
                            for l in cols:
                                bits |= 1 << (k * n + l)
                        out.append(_Candidate(bits, rows, cols))
    return out


def enumerate_partitions(Z, fam: SupportFamilySpec, tol: TolerancePolicy = DEFAULT_TOL,
                         budget: int = DEFAULT_BUDGET) -> PartitionCertificate:
    """All rank-one tilings of ``supp(Z)`` allowed by ``fam``, up to reordering.

    Exact-cover search: always branch on the first uncovered cell in
    row-major order, trying only rectangles whose first cell it is.
    """
    Z = as_matrix(Z)
    m, n = Z.shape
    if (m, n) != (fam.m, fam.n):
        raise ValueError(f"matrix shape {Z.shape} does not match family ({fam.m}, {fam.n})")
    r = fam.r
    target = 0
    for k, l in zip(*np.nonzero(support(Z, tol))):
        target |= 1 << (int(k) * n + int(l))

    cands = _candidates(Z, fam.left_col_sparsity, fam.right_col_sparsity, tol)
    by_first: dict[int, list[_Candidate]] = {}
    for c in cands:
        by_first.setdefault((c.bits & -c.bits).bit_length() - 1, []).append(c)
    for lst in by_first.values():
        lst.sort(key=lambda c: -c.bits.bit_count())
    max_area = max((c.bits.bit_count() for c in cands), default=0)
    log.debug("%d candidate rectangles, max area %d", len(cands), max_area)

    found: set[RankOneSupportTuple] = set()
    nodes = 0
    chosen: list[_Candidate] = []

    def search(uncovered: int):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise SearchBudgetExceeded(f"search exceeded {budget} nodes")
        if not uncovered:
            sups = [RankOneSupport([k + 1 for k in c.rows], [l + 1 for l in c.cols]) for c in chosen]
            sups += [RankOneSupport()] * (r - len(sups))
            found.add(RankOneSupportTuple(m, n, tuple(sups)).canonical())
            return
        left = r - len(chosen)
        if left == 0 or uncovered.bit_count() > left * max_area:
            return
        first = (uncovered & -uncovered).bit_length() - 1
        for c in by_first.get(first, ()):
            if c.bits & ~uncovered:
                continue
            chosen.append(c)
            search(uncovered & ~c.bits)
            chosen.pop()

    search(target)
    partitions = tuple(sorted(found, key=lambda t: [s.key() for s in t]))
    status = Status.NONE if not partitions else Status.UNIQUE if len(partitions) == 1 else Status.MULTIPLE
    return PartitionCertificate(status, partitions, nodes)


def verify_parity_column_structure(cert: PartitionCertificate, N: int) -> bool:
    """Every block has same-parity rows and two columns ``l1, l2`` with ``l1 + l2 - 1 = N``."""
    for part in cert.partitions:
        if (part.m, part.n) != (N, N):
            raise ValueError(f"certificate is for {part.m}x{part.n} matrices, not {N}x{N}")
        for s in part:
            if not s:
                continue
            if len({k % 2 for k in s.rows}) != 1:
                return False
            if len(s.cols) != 2 or sum(s.cols) - 1 != N:
                return False
    return True


def supports_pairwise_disjoint(S: RankOneSupportTuple) -> bool:
    return pairwise_disjoint(S)


def cross_check_uniqueness(Z, fam: SupportFamilySpec, tol: TolerancePolicy = DEFAULT_TOL,
                           budget: int = DEFAULT_BUDGET) -> bool:
    """End-to-end certificate that ``Z`` has a unique factorization in ``fam``.

    Requires (1) ``||Z||_0 = r a b``, which forces every feasible tuple of
    contributions to have disjoint supports, (2) a unique rank-one tiling of
    ``supp(Z)``, and (3) successful completion on that tiling.
    """
    Z = as_matrix(Z)
    cert = enumerate_partitions(Z, fam, tol, budget)
    if cert.status is not Status.UNIQUE:
        return False
    nnz = int(support(Z, tol).sum())
    if nnz != fam.r * fam.left_col_sparsity * fam.right_col_sparsity:
        return False
    (S,) = cert.partitions
    if not supports_pairwise_disjoint(S):
        return False
    return emd_complete(Z, S, tol).complete
