"""Command-line entry point.

Exit codes: 0 success, 1 usage or I/O error, 2 incompatible input,
3 stalled completion, 4 search budget exceeded, 5 chains not equivalent.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .core import TolerancePolicy, rel_frobenius_error
from .emd import Outcome, chain_scale_equivalent, emd_complete
from .hier import (
    ModelMismatchError,
    TreeError,
    dft_butterfly_chain,
    hierarchical_factorize,
    make_tree,
    random_butterfly_chain,
)
from .oracle import DEFAULT_BUDGET, SearchBudgetExceeded, enumerate_partitions
from .supports import SupportFamilySpec, closability
from .transforms import TransformKind, bit_reversal_perm, gen_transform, log2_exact

EXIT_OK, EXIT_USAGE, EXIT_INCOMPATIBLE, EXIT_STALLED, EXIT_BUDGET, EXIT_NOT_EQUIVALENT = range(6)

GEN_KINDS = [k.value for k in TransformKind] + ["random-butterfly-chain"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonneg_float(text: str) -> float:
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative number, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="sparseid",
        description="Sparse matrix factorization identifiability tools.",
        epilog="exit codes: 0 ok, 1 usage or I/O error, 2 incompatible, 3 stalled, "
               "4 search budget exceeded, 5 chains not equivalent. Formats: FORMATS.md",
    )
    parser.add_argument("--tolerance", type=_nonneg_float, default=1e-9,
                        help="relative tolerance for rank and equality decisions (default 1e-9)")
    parser.add_argument("--zero-threshold", type=_nonneg_float, default=1e-12,
                        help="magnitude below which an entry counts as zero (default 1e-12)")
    parser.add_argument("--seed", type=int, default=0, help="seed for random fixtures (default 0)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="write a transform matrix as JSON")
    p.add_argument("--kind", required=True, choices=GEN_KINDS)
    p.add_argument("--size", required=True, type=_positive_int)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--chain-dir", type=Path,
                   help="also write the generating factors (dft: butterfly factors with R_N folded "
                        "into the last one; random-butterfly-chain: the random factors)")

    p = sub.add_parser("factorize", help="hierarchical butterfly factorization")
    p.add_argument("--matrix", required=True, type=Path)
    p.add_argument("--layers", required=True, type=_positive_int)
    p.add_argument("--tree", required=True,
                   help="left-comb, right-comb, balanced, or a JSON file with a nested tree")
    p.add_argument("--dft-bit-reversal", action="store_true",
                   help="constrain the innermost factor to S^1 R_N")
    p.add_argument("--mode", choices=["exact", "svd"], default="exact")
    p.add_argument("--out-dir", required=True, type=Path)

    p = sub.add_parser("complete", help="fixed-support decomposition by iterative completion")
    p.add_argument("--matrix", required=True, type=Path)
    p.add_argument("--tuple", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("closability", help="closability of a rank-one support tuple")
    p.add_argument("--tuple", required=True, type=Path)

    p = sub.add_parser("enumerate", help="enumerate rank-one partitions of supp(Z)")
    p.add_argument("--matrix", required=True, type=Path)
    p.add_argument("--left-sparsity", required=True, type=_positive_int)
    p.add_argument("--right-sparsity", required=True, type=_positive_int)
    p.add_argument("--rank", type=_positive_int, help="number of rank-one terms (default: columns of Z)")
    p.add_argument("--budget", type=_positive_int, default=DEFAULT_BUDGET)

    p = sub.add_parser("verify", help="check two factor chains agree up to scaling")
    p.add_argument("--original", required=True, type=Path)
    p.add_argument("--recovered", required=True, type=Path)
    return parser


def _print(obj) -> None:
    print(json.dumps(obj, indent=1))


def cmd_gen(args, tol) -> int:
    if args.kind == "random-butterfly-chain":
        L = log2_exact(args.size)
        chain = random_butterfly_chain(L, np.random.default_rng(args.seed))
        Z = np.linalg.multi_dot(chain) if L > 1 else chain[0]
    else:
        if args.kind == TransformKind.HADAMARD.value:
            log2_exact(args.size)
        Z = gen_transform(args.kind, args.size)
        chain = dft_butterfly_chain(args.size) if args.kind == "dft" and args.chain_dir else None
    io.save_matrix(Z, args.out)
    if args.chain_dir:
        if chain is None:
            raise UsageError(f"--chain-dir is not available for kind {args.kind}")
        io.save_chain(chain, args.chain_dir, kind=args.kind, size=args.size)
    return EXIT_OK


def _load_tree(spec: str, L: int):
    if spec.replace("-", "_") in ("left_comb", "right_comb", "balanced"):
        return make_tree(spec, 1, L)
    return make_tree(io.load(spec), 1, L)


def cmd_factorize(args, tol) -> int:
    Z = io.load_matrix(args.matrix)
    L = args.layers
    tree = _load_tree(args.tree, L)
    perm = bit_reversal_perm(2**L) if args.dft_bit_reversal else None
    try:
        chain = hierarchical_factorize(Z, tree, L, args.mode, tol, inner_perm=perm)
    except ModelMismatchError as exc:
        print(f"sparseid: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    residual = rel_frobenius_error(chain.product(), Z, tol)
    io.save_chain(
        list(chain), args.out_dir,
        tree=tree.to_nested(), mode=args.mode, dft_bit_reversal=args.dft_bit_reversal,
        residual=residual, levels=[lv.to_json() for lv in chain.levels],
    )
    _print({"layers": L, "residual": residual, "out_dir": str(args.out_dir)})
    return EXIT_OK


def cmd_complete(args, tol) -> int:
    Z = io.load_matrix(args.matrix)
    S = io.load_tuple(args.tuple)
    result = emd_complete(Z, S, tol)
    io.dump(result.to_json(), args.out)
    return {
        Outcome.COMPLETE: EXIT_OK,
        Outcome.INCOMPATIBLE: EXIT_INCOMPATIBLE,
        Outcome.STALLED: EXIT_STALLED,
    }[result.status]


def cmd_closability(args, tol) -> int:
    closable, steps = closability(io.load_tuple(args.tuple))
    _print({"closable": closable, "steps": steps})
    return EXIT_OK


def cmd_enumerate(args, tol) -> int:
    Z = io.load_matrix(args.matrix)
    m, n = Z.shape
    fam = SupportFamilySpec(args.left_sparsity, args.right_sparsity, m, n, args.rank or n)
    try:
        cert = enumerate_partitions(Z, fam, tol, args.budget)
    except SearchBudgetExceeded as exc:
        print(f"sparseid: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    _print(cert.to_json())
    return EXIT_OK


def cmd_verify(args, tol) -> int:
    original = io.load_chain(args.original)
    recovered = io.load_chain(args.recovered)
    if len(original) != len(recovered):
        raise UsageError(f"chain lengths differ: {len(original)} vs {len(recovered)}")
    witness = chain_scale_equivalent(original, recovered, tol)
    if witness is None:
        _print({"equivalent": False})
        return EXIT_NOT_EQUIVALENT
    _print({"equivalent": True, "scaling": witness.to_json()})
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "factorize": cmd_factorize,
    "complete": cmd_complete,
    "closability": cmd_closability,
    "enumerate": cmd_enumerate,
    "verify": cmd_verify,
}


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        tol = TolerancePolicy(args.zero_threshold, args.tolerance)
        return COMMANDS[args.command](args, tol)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, TreeError, KeyError) as exc:
        print(f"sparseid: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
