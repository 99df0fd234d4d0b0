"""Shared fixture data and random instance generators."""

import numpy as np

from sparseid.supports import RankOneSupport, RankOneSupportTuple

EXAMPLE_Z = np.array([[0, 1, 2, 0], [1, 2, 2, 0], [2, 6, 5, 6], [3, 5, 2, 4]], dtype=float)


def fig_tuple() -> RankOneSupportTuple:
    return RankOneSupportTuple(4, 4, (
        RankOneSupport({2, 3, 4}, {1, 2}),
        RankOneSupport({1, 2, 3}, {2, 3}),
        RankOneSupport({3, 4}, {2, 3, 4}),
    ))


# contributions of the example, worked out by hand from the completion rules
EXAMPLE_C = [
    np.array([[0, 0, 0, 0], [1, 1, 0, 0], [2, 2, 0, 0], [3, 3, 0, 0]], dtype=float),
    np.array([[0, 1, 2, 0], [0, 1, 2, 0], [0, 1, 2, 0], [0, 0, 0, 0]], dtype=float),
    np.array([[0, 0, 0, 0], [0, 0, 0, 0], [0, 3, 3, 6], [0, 2, 2, 4]], dtype=float),
]


def random_rectangle(rng, m, n, max_rows=None, max_cols=None) -> RankOneSupport:
    h = rng.integers(1, (max_rows or m) + 1)
    w = rng.integers(1, (max_cols or n) + 1)
    rows = rng.choice(np.arange(1, m + 1), size=h, replace=False)
    cols = rng.choice(np.arange(1, n + 1), size=w, replace=False)
    return RankOneSupport(rows.tolist(), cols.tolist())


def random_tuple(rng, m, n, r) -> RankOneSupportTuple:
    return RankOneSupportTuple(m, n, tuple(random_rectangle(rng, m, n) for _ in range(r)))


def random_disjoint_tuple(rng, m, n, r, tries=200) -> RankOneSupportTuple:
    """Rectangles added one at a time, rejecting overlaps; empty if none fits."""
    used = set()
    sups = []
    for _ in range(r):
        for _ in range(tries):
            s = random_rectangle(rng, m, n, max_rows=max(1, m // 2), max_cols=max(1, n // 2))
            if not (s.cells & used):
                used |= s.cells
                sups.append(s)
                break
        else:
            sups.append(RankOneSupport())
    return RankOneSupportTuple(m, n, tuple(sups))


def random_contributions(rng, S: RankOneSupportTuple) -> list[np.ndarray]:
    """Rank-one matrices with support exactly ``S_i`` (no accidental zeros)."""
    out = []
    for s in S:
        C = np.zeros((S.m, S.n), dtype=complex)
        if s:
            u = np.zeros(S.m, complex)
            v = np.zeros(S.n, complex)
            rows = np.array(sorted(s.rows)) - 1
            cols = np.array(sorted(s.cols)) - 1
            u[rows] = np.exp(2j * np.pi * rng.random(len(rows))) * rng.uniform(0.5, 2, len(rows))
            v[cols] = np.exp(2j * np.pi * rng.random(len(cols))) * rng.uniform(0.5, 2, len(cols))
            C = np.outer(u, v)
        out.append(C)
    return out
