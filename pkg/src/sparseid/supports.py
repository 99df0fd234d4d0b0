"""Rank-one support tuples, observable graphs, and their closure.

A rank-one support is a rectangle ``rows x cols`` of 1-based indices.  The
bipartite graph attached to support ``i`` has the rows as red vertices, the
columns as blue vertices and a subset of the rectangle as edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import Permutation, as_mask, full_mask, identity_mask, kronecker

Cell = tuple[int, int]


@dataclass(frozen=True)
class RankOneSupport:
    rows: frozenset[int] = field(default_factory=frozenset)
    cols: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        rows, cols = frozenset(self.rows), frozenset(self.cols)
        if bool(rows) != bool(cols):
            rows = cols = frozenset()
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)

    @property
    def cells(self) -> frozenset[Cell]:
        return frozenset((k, l) for k in self.rows for l in self.cols)

    def __len__(self) -> int:
        return len(self.rows) * len(self.cols)

    def __bool__(self) -> bool:
        return bool(self.rows)

    def key(self) -> tuple:
        """Sort key used for canonical ordering."""
        return (tuple(sorted(self.rows)), tuple(sorted(self.cols)))

    def mask(self, m: int, n: int) -> np.ndarray:
        S = np.zeros((m, n), dtype=bool)
        if self:
            S[np.ix_(sorted(k - 1 for k in self.rows), sorted(l - 1 for l in self.cols))] = True
        return S


@dataclass(frozen=True)
class RankOneSupportTuple:
    m: int
    n: int
    supports: tuple[RankOneSupport, ...]

    def __post_init__(self):
        sups = tuple(
            s if isinstance(s, RankOneSupport) else RankOneSupport(*s) for s in self.supports
        )
        for s in sups:
            if any(not 1 <= k <= self.m for k in s.rows) or any(not 1 <= l <= self.n for l in s.cols):
                raise ValueError(f"support {s.key()} exceeds a {self.m}x{self.n} matrix")
        object.__setattr__(self, "supports", sups)

    @property
    def r(self) -> int:
        return len(self.supports)

    def __iter__(self):
        return iter(self.supports)

    def __getitem__(self, i):
        return self.supports[i]

    def masks(self) -> list[np.ndarray]:
        return [s.mask(self.m, self.n) for s in self.supports]

    def canonical(self) -> "RankOneSupportTuple":
        """Nonempty supports sorted lexicographically, empty ones last."""
        nonempty = sorted((s for s in self.supports if s), key=RankOneSupport.key)
        empty = [RankOneSupport()] * (self.r - len(nonempty))
        return RankOneSupportTuple(self.m, self.n, tuple(nonempty + empty))

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "supports": [{"rows": sorted(s.rows), "cols": sorted(s.cols)} for s in self.supports],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RankOneSupportTuple":
        return cls(
            int(obj["m"]),
            int(obj["n"]),
            tuple(RankOneSupport(s["rows"], s["cols"]) for s in obj["supports"]),
        )


def lift_supports(S_left, S_right) -> RankOneSupportTuple:
    """Support ``i`` is the outer product of column ``i`` of each mask."""
    S_left, S_right = as_mask(S_left), as_mask(S_right)
    if S_left.shape[1] != S_right.shape[1]:
        raise ValueError(
            f"column-count mismatch: {S_left.shape[1]} vs {S_right.shape[1]}"
        )
    sups = []
    for i in range(S_left.shape[1]):
        rows = np.flatnonzero(S_left[:, i]) + 1
        cols = np.flatnonzero(S_right[:, i]) + 1
        sups.append(RankOneSupport(rows.tolist(), cols.tolist()))
    return RankOneSupportTuple(S_left.shape[0], S_right.shape[0], tuple(sups))


def pairwise_disjoint(S: RankOneSupportTuple) -> bool:
    seen: set[Cell] = set()
    for s in S:
        cells = s.cells
        if not seen.isdisjoint(cells):
            return False
        seen |= cells
    return True


# --- bipartite graphs -------------------------------------------------------


@dataclass(frozen=True)
class BipartiteGraph:
    red: frozenset[int]
    blue: frozenset[int]
    edges: frozenset[Cell]

    def __post_init__(self):
        for k, l in self.edges:
            if k not in self.red or l not in self.blue:
                raise ValueError(f"edge ({k}, {l}) outside the vertex sets")

    @property
    def complete_edges(self) -> frozenset[Cell]:
        return frozenset((k, l) for k in self.red for l in self.blue)

    def is_complete(self) -> bool:
        return len(self.edges) == len(self.red) * len(self.blue)

    def with_edges(self, edges: Iterable[Cell]) -> "BipartiteGraph":
        return BipartiteGraph(self.red, self.blue, frozenset(edges))


GraphTuple = tuple[BipartiteGraph, ...]


def observable_graphs(S: RankOneSupportTuple) -> GraphTuple:
    """Graph ``i`` keeps the cells of ``S_i`` covered by no other support."""
    cells = [s.cells for s in S]
    graphs = []
    for i, s in enumerate(S):
        others = set().union(*(c for j, c in enumerate(cells) if j != i))
        graphs.append(BipartiteGraph(s.rows, s.cols, cells[i] - others))
    return tuple(graphs)


def _complete_components(G: BipartiteGraph) -> BipartiteGraph:
    parent: dict = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k, l in G.edges:
        parent[find(("r", k))] = find(("b", l))
    groups: dict = {}
    for k in G.red:
        groups.setdefault(find(("r", k)), ([], []))[0].append(k)
    for l in G.blue:
        groups.setdefault(find(("b", l)), ([], []))[1].append(l)
    edges = {(k, l) for rows, cols in groups.values() for k in rows for l in cols}
    return G.with_edges(edges)


def complete_inside(G: Sequence[BipartiteGraph]) -> GraphTuple:
    """Operation ``a``: fill every connected component of each graph."""
    return tuple(_complete_components(g) for g in G)


def complete_across(G: Sequence[BipartiteGraph]) -> GraphTuple:
    """Operation ``b``: add edges that every other covering graph already has."""
    out = []
    for i, g in enumerate(G):
        added = set()
        for e in g.complete_edges - g.edges:
            if all(e in h.edges for j, h in enumerate(G) if j != i and e in h.complete_edges):
                added.add(e)
        out.append(g.with_edges(g.edges | added))
    return tuple(out)


def closure_step(G: Sequence[BipartiteGraph]) -> GraphTuple:
    return complete_across(complete_inside(G))


def closure(G: Sequence[BipartiteGraph]) -> tuple[GraphTuple, int]:
    """Fixed point of :func:`closure_step` and the number of steps to reach it."""
    G = tuple(G)
    steps = 0
    while True:
        H = closure_step(G)
        if H == G:
            return G, steps
        G, steps = H, steps + 1


def is_closable(S: RankOneSupportTuple) -> bool:
    closed, _ = closure(observable_graphs(S))
    return all(g.is_complete() for g in closed)


def closability(S: RankOneSupportTuple) -> tuple[bool, int]:
    closed, steps = closure(observable_graphs(S))
    return all(g.is_complete() for g in closed), steps


# --- butterfly supports -----------------------------------------------------


def block_of_identities(q: int, p: int) -> np.ndarray:
    """``U_{2^(q-p+1)} (x) I_{2^(p-1)}``."""
    return kronecker(full_mask(2 ** (q - p + 1)), identity_mask(2 ** (p - 1)))


def partial_product_support(q: int, p: int, L: int) -> np.ndarray:
    """``W^[q;p] = I_{N/2^q} (x) (U_{2^(q-p+1)} (x) I_{2^(p-1)})`` with ``N = 2^L``."""
    if not 1 <= p <= q <= L:
        raise ValueError(f"need 1 <= p <= q <= L, got p={p}, q={q}, L={L}")
    return kronecker(identity_mask(2 ** (L - q)), block_of_identities(q, p))


def butterfly_support(ell: int, L: int) -> np.ndarray:
    if not 1 <= ell <= L:
        raise ValueError(f"ell must lie in [1, {L}], got {ell}")
    return partial_product_support(ell, ell, L)


def permute_columns(S, perm: Permutation) -> np.ndarray:
    """Mask of ``S @ P`` for the permutation matrix ``P``."""
    return as_mask(S)[:, np.array(perm.image) - 1]


@dataclass(frozen=True)
class SupportFamilySpec:
    """Pairs of masks ``(m x r, n x r)`` that are ``a``- and ``b``-sparse by column."""

    left_col_sparsity: int
    right_col_sparsity: int
    m: int
    n: int
    r: int

    def __post_init__(self):
        if min(self.left_col_sparsity, self.right_col_sparsity, self.m, self.n, self.r) < 1:
            raise ValueError("family parameters must be positive")
        if self.left_col_sparsity > self.m or self.right_col_sparsity > self.n:
            raise ValueError("column sparsity exceeds the column length")


def in_family(S_left, S_right, fam: SupportFamilySpec) -> bool:
    S_left, S_right = as_mask(S_left), as_mask(S_right)
    if S_left.shape != (fam.m, fam.r) or S_right.shape != (fam.n, fam.r):
        raise ValueError(
            f"masks {S_left.shape}, {S_right.shape} do not match family "
            f"({fam.m}x{fam.r}, {fam.n}x{fam.r})"
        )
    return bool(
        (S_left.sum(axis=0) <= fam.left_col_sparsity).all()
        and (S_right.sum(axis=0) <= fam.right_col_sparsity).all()
    )

