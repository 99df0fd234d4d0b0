import numpy as np
import pytest

from fixtures import fig_tuple
from oracles import naive_partitions
from sparseid.core import support
from sparseid.oracle import (
    PartitionCertificate,
    SearchBudgetExceeded,
    Status,
    cross_check_uniqueness,
    enumerate_partitions,
    supports_pairwise_disjoint,
    verify_parity_column_structure,
)
from sparseid.supports import (
    RankOneSupport,
    RankOneSupportTuple,
    SupportFamilySpec,
    lift_supports,
    partial_product_support,
)
from sparseid.transforms import gen_transform


def fam_for(N):
    return SupportFamilySpec(N // 2, 2, N, N, N)


def _as_sets(cert):
    return {frozenset((s.rows, s.cols) for s in part if s) for part in cert.partitions}


def test_dft4_unique_partition():
    cert = enumerate_partitions(gen_transform("dft", 4), fam_for(4))
    assert cert.status is Status.UNIQUE
    want = [({1, 3}, {1, 3}), ({2, 4}, {1, 3}), ({1, 3}, {2, 4}), ({2, 4}, {2, 4})]
    assert _as_sets(cert) == {frozenset((frozenset(a), frozenset(b)) for a, b in want)}


def test_hadamard4_multiple():
    cert = enumerate_partitions(gen_transform("hadamard", 4), fam_for(4))
    assert cert.status is Status.MULTIPLE
    # found by search, kept as a regression fixture
    assert len(cert.partitions) == 3
    assert not cross_check_uniqueness(gen_transform("hadamard", 4), fam_for(4))


def test_identity_forced():
    cert = enumerate_partitions(np.eye(2), SupportFamilySpec(1, 1, 2, 2, 2))
    assert cert.status is Status.UNIQUE
    assert cert.partitions[0].supports == (RankOneSupport({1}, {1}), RankOneSupport({2}, {2}))


def test_no_partition():
    cert = enumerate_partitions(np.ones((2, 2)), SupportFamilySpec(1, 1, 2, 2, 2))
    assert cert.status is Status.NONE and cert.to_json()["count"] == 0


@pytest.mark.parametrize("kind", ["dft", "dct2", "dst2"])
def test_cross_check_n4(kind):
    assert cross_check_uniqueness(gen_transform(kind, 4), fam_for(4))


@pytest.mark.parametrize("kind", ["dct2", "dst2"])
@pytest.mark.parametrize("N", [4, 8])
def test_parity_structure(kind, N):
    cert = enumerate_partitions(gen_transform(kind, N), fam_for(N))
    assert cert.partitions
    assert verify_parity_column_structure(cert, N)


def test_parity_predicate_rejects_bad_columns():
    bad = RankOneSupportTuple(4, 4, (RankOneSupport({1, 3}, {1, 2}),))
    assert not verify_parity_column_structure(PartitionCertificate(Status.UNIQUE, (bad,)), 4)
    with pytest.raises(ValueError):
        verify_parity_column_structure(PartitionCertificate(Status.UNIQUE, (bad,)), 8)


def test_supports_pairwise_disjoint_examples():
    for L, p, ell, q in [(3, 1, 1, 3), (3, 1, 2, 3), (3, 2, 2, 3), (3, 1, 1, 2)]:
        S = lift_supports(partial_product_support(q, ell + 1, L), partial_product_support(ell, p, L).T)
        assert supports_pairwise_disjoint(S)
    assert not supports_pairwise_disjoint(fig_tuple())
    assert supports_pairwise_disjoint(RankOneSupportTuple(3, 3, (RankOneSupport({1, 2}, {1}),)))


def test_budget_guard():
    with pytest.raises(SearchBudgetExceeded):
        enumerate_partitions(gen_transform("hadamard", 8), fam_for(8), budget=50)


def test_canonical_form_is_relabeling_invariant():
    cert = enumerate_partitions(gen_transform("hadamard", 4), fam_for(4))
    for part in cert.partitions:
        rev = RankOneSupportTuple(part.m, part.n, tuple(reversed(part.supports)))
        assert rev.canonical() == part


def test_counting_corollary_block_sizes():
    for kind in ("dft", "dct2", "dst2", "hadamard"):
        Z = gen_transform(kind, 4)
        assert support(Z).sum() == 4 * 2 * 2
        for part in enumerate_partitions(Z, fam_for(4)).partitions:
            assert all(len(s) == 4 for s in part)


def _random_integer_instance(rng):
    """3x3 integer matrix mixing planted rank-one blocks and random entries."""
    Z = np.zeros((3, 3), dtype=int)
    for _ in range(rng.integers(1, 4)):
        rows = rng.choice(3, size=rng.integers(1, 3), replace=False)
        cols = rng.choice(3, size=rng.integers(1, 3), replace=False)
        u = rng.choice([-2, -1, 1, 2, 3], size=len(rows))
        v = rng.choice([-2, -1, 1, 2], size=len(cols))
        Z[np.ix_(rows, cols)] = np.outer(u, v)
    noise = rng.random((3, 3)) < 0.2
    Z[noise] = rng.integers(-3, 4, size=noise.sum())
    return Z


def test_agrees_with_naive_enumeration():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        Z = _random_integer_instance(rng)
        a, b, r = rng.integers(1, 4), rng.integers(1, 4), rng.integers(1, 5)
        cert = enumerate_partitions(Z.astype(float), SupportFamilySpec(a, b, 3, 3, r))
        assert _as_sets(cert) == naive_partitions(Z, a, b, r)
