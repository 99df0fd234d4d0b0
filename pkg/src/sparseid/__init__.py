"""Identifiability tools for sparse matrix factorization.

Fixed-support exact matrix decomposition by rank-one completion,
hierarchical butterfly factorization, and brute-force uniqueness
certificates for DFT, DCT-II, DST-II and Hadamard matrices.
"""

from .core import DEFAULT_TOL, Permutation, TolerancePolicy, kronecker, rank_le_one, rel_frobenius_error
from .emd import (
    ContributionTuple,
    EmdOutcome,
    Outcome,
    ScalingChain,
    chain_scale_equivalent,
    contributions_to_factors,
    emd_complete,
    pair_perm_scale_equivalent,
    pair_scale_equivalent,
    sum_contributions,
)
from .hier import FactorChain, PartitioningTree, hierarchical_factorize, make_tree, verify_s_unique_recovery
from .oracle import (
    PartitionCertificate,
    cross_check_uniqueness,
    enumerate_partitions,
    supports_pairwise_disjoint,
    verify_parity_column_structure,
)
from .supports import (
    RankOneSupport,
    RankOneSupportTuple,
    SupportFamilySpec,
    butterfly_support,
    closure,
    closure_step,
    in_family,
    is_closable,
    lift_supports,
    observable_graphs,
    partial_product_support,
)
from .transforms import (
    TransformKind,
    bit_reversal_perm,
    butterfly_factor,
    gen_transform,
    odd_even_perm,
)

__version__ = "0.1.0"
