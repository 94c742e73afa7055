"""Merge-resolution proof toolkit for QBF.

Submodules:
  formula     prenex CNF model, restriction, normalization
  qdimacs     QDIMACS reading/writing and formula hashing
  mergemap    hash-consed branching-program strategies
  semantics   brute-force game evaluation and strategy verification
  calculus    proof lines, inference rules, checker, strategy extraction
  proofio     proof text format and strategy-circuit export
  families    benchmark formula generators
  refutations constructive refutation builders
  cli         command-line entry point
"""

from .calculus import (
    Axiom,
    BlockedResolutionError,
    CheckerConfig,
    CheckReport,
    Proof,
    ProofLine,
    Resolve,
    RuleError,
    WeakenExist,
    WeakenStrategy,
    axiom_line,
    check_line_invariant,
    check_proof,
    config_for_mode,
    extract_strategy,
    replay,
    resolve_lines,
    weaken_exist,
    weaken_strategy,
)
from .families import CoveringPartition, Family, default_partition, gen
from .formula import (
    EXISTS,
    FORALL,
    PCNF,
    FormulaError,
    QuantBlock,
    equivalent,
    normalize,
    restrict,
)
from .mergemap import (
    MergeMap,
    NodeTable,
    build_parity_map,
    constant_map,
    is_isomorphic,
    merge,
    trivial_map,
)
from .proofio import export_strategy_circuit, parse_proof, write_proof
from .qdimacs import formula_hash, parse_qdimacs, write_qdimacs
from .refutations import BuiltProof, build
from .semantics import BudgetExceededError, check_universal_strategy, eval_qbf

__all__ = [name for name in dir() if not name.startswith("_")]
