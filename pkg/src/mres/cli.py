"""Command-line interface.

Exit codes: 0 success, 1 check failure (with the offending step index or
property name in the key=value block), 2 usage or I/O errors. All commands
print a machine-readable key=value block or a file artifact; identical
invocations produce byte-identical output.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from .calculus import (
    check_proof,
    config_for_mode,
    extract_strategy,
    first_invariant_violation,
    replay,
    MODES,
    NotARefutationError,
    ProofStepError,
)
from .families import Family, default_partition, family_from_name, gen, qdimacs_comments
from .formula import PCNF, FormulaError, normalize as normalize_pcnf, restrict
from .mergemap import format_merge_map
from .proofio import (
    ProofFormatError,
    ProofMismatchError,
    export_strategy_circuit,
    parse_proof,
    proof_file_comments,
    write_proof,
)
from .qdimacs import QDimacsError, formula_hash, parse_qdimacs, write_qdimacs
from .refutations import build
from .semantics import BudgetExceededError, check_universal_strategy, eval_qbf


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _write_out(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from None


def _emit(pairs: dict) -> None:
    for key, value in pairs.items():
        if isinstance(value, bool):
            value = int(value)
        print(f"{key}={value}")


def _load_formula(args, proof_text: Optional[str] = None) -> PCNF:
    """Formula from --formula, or regenerated from the proof's family
    comment (`family <name> n=<n>`)."""
    if getattr(args, "formula", None):
        return parse_qdimacs(_read(args.formula))
    if proof_text is not None:
        for comment in proof_file_comments(proof_text):
            tokens = comment.split()
            if len(tokens) == 3 and tokens[0] == "family" and tokens[2].startswith("n="):
                fam = family_from_name(tokens[1])
                n = int(tokens[2][2:])
                return gen(fam, n)
    raise UsageError("no formula: pass --formula or use a proof with a family comment")


def _load_proof(args):
    text = _read(args.proof)
    formula = _load_formula(args, text)
    proof = parse_proof(text, formula)
    return formula, proof


def _parse_assignment(spec: str, f: PCNF) -> dict[int, bool]:
    """Comma-separated `var=0/1` tokens with QDIMACS indices."""
    rho: dict[int, bool] = {}
    if not spec.strip():
        return rho
    for token in spec.split(","):
        token = token.strip()
        parts = token.split("=")
        if len(parts) != 2:
            raise UsageError(f"bad assignment token {token!r}, expected var=0/1")
        try:
            var = int(parts[0])
            value = int(parts[1])
        except ValueError:
            raise UsageError(f"bad assignment token {token!r}") from None
        if value not in (0, 1):
            raise UsageError(f"assignment value must be 0 or 1 in {token!r}")
        if var not in set(f.variables):
            raise UsageError(f"unknown variable {var} in assignment")
        if var in rho:
            raise UsageError(f"variable {var} assigned twice")
        rho[var] = bool(value)
    return rho


# -- commands ---------------------------------------------------------------


def cmd_gen(args) -> int:
    fam = family_from_name(args.family)
    partition = None
    if args.partition is not None:
        if args.partition != "default":
            raise UsageError("only the default partition is built in")
        partition = default_partition(args.n)
    f = gen(fam, args.n, partition)
    if args.format == "stats-kv":
        _emit(
            {
                "family": fam.value,
                "n": args.n,
                "vars": len(f.variables),
                "clauses": len(f.matrix),
                "hash": formula_hash(f),
            }
        )
        return 0
    if args.normalize:
        _write_out(write_qdimacs(normalize_pcnf(f)), args.output)
    else:
        _write_out(write_qdimacs(f, qdimacs_comments(fam, args.n, f)), args.output)
    return 0


def cmd_prove(args) -> int:
    fam = family_from_name(args.family)
    try:
        built = build(fam, args.n, args.mode)
    except LookupError as exc:
        raise UsageError(str(exc)) from None
    comments = [
        f"family {fam.value} n={args.n}",
        f"mode {built.mode}",
        f"steps {built.steps_formula}",
        f"strategy {built.strategy_note}",
    ]
    _write_out(write_proof(built.proof, comments), args.output)
    return 0


def cmd_check(args) -> int:
    formula, proof = _load_proof(args)
    cfg = config_for_mode(args.mode, regular=args.regular)
    if args.invariant:
        cfg.semantic_invariant = "exhaustive"
    report = check_proof(formula, proof, cfg)
    pairs = {
        "valid": report.valid,
        "verdict": report.verdict(),
        "steps": report.num_steps,
        "mode": args.mode,
        "regular": "" if report.regular is None else int(report.regular),
        "refutation": report.final_clause_empty,
        "max_map_nodes": report.max_map_nodes,
    }
    for rule, count in report.rule_counts.items():
        pairs[f"count_{rule}"] = count
    if not report.valid:
        pairs["step"] = report.failed_step
        pairs["reason"] = report.failure_reason
    _emit(pairs)
    return 0 if report.valid else 1


def cmd_invariant(args) -> int:
    formula, proof = _load_proof(args)
    if len(formula.existentials) > args.max_vars:
        raise UsageError(
            f"{len(formula.existentials)} existentials exceed --max-vars {args.max_vars}"
        )
    lines = replay(formula, proof)
    bad = first_invariant_violation(formula, lines)
    _emit(
        {
            "holds": bad is None,
            "lines": len(lines),
            "property": "line_invariant",
            **({"step": bad} if bad is not None else {}),
        }
    )
    return 0 if bad is None else 1


def cmd_verify_strategy(args) -> int:
    formula, proof = _load_proof(args)
    strategy = extract_strategy(formula, proof)
    ok = check_universal_strategy(formula, strategy, max_existentials=args.max_vars)
    nontrivial = sum(0 if m.is_trivial else 1 for m in strategy.values())
    _emit(
        {
            "verified": ok,
            "property": "universal_strategy",
            "universals": len(formula.universals),
            "nontrivial_maps": nontrivial,
        }
    )
    return 0 if ok else 1


def cmd_restrict(args) -> int:
    f = parse_qdimacs(_read(args.formula))
    rho = _parse_assignment(args.assignment, f)
    g = restrict(f, rho)
    if args.format == "stats-kv":
        _emit({"vars": len(g.variables), "clauses": len(g.matrix), "hash": formula_hash(g)})
        return 0
    if args.normalize:
        g = normalize_pcnf(g)
    _write_out(write_qdimacs(g), args.output)
    return 0


def cmd_oracle(args) -> int:
    f = parse_qdimacs(_read(args.formula))
    value = eval_qbf(f, max_vars=args.max_vars)
    _emit({"value": "true" if value else "false", "vars": len(f.variables)})
    return 0


def cmd_stats(args) -> int:
    formula, proof = _load_proof(args)
    report = check_proof(formula, proof, config_for_mode("wef"))
    pairs = {
        "steps": report.num_steps,
        "lines": report.num_lines,
        "valid": report.valid,
        "verdict": report.verdict(),
        "refutation": report.final_clause_empty,
        "regular": "" if report.regular is None else int(report.regular),
        "max_map_nodes": report.max_map_nodes,
        "formula_hash": formula_hash(formula),
    }
    for rule, count in report.rule_counts.items():
        pairs[f"count_{rule}"] = count
    if not report.valid:
        pairs["step"] = report.failed_step
        pairs["reason"] = report.failure_reason
    _emit(pairs)
    if args.dump_maps and report.valid and report.final_clause_empty:
        strategy = extract_strategy(formula, proof)
        for u in formula.universals:
            sys.stdout.write(format_merge_map(strategy[u]))
    return 0 if report.valid else 1


def cmd_export_circuit(args) -> int:
    formula, proof = _load_proof(args)
    _write_out(export_strategy_circuit(formula, proof), args.output)
    return 0


# -- wiring -------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mres",
        description="Merge-resolution proof toolkit for QBF",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    families = sorted(f.value for f in Family)

    p = sub.add_parser("gen", help="generate a family instance as QDIMACS")
    p.add_argument("family", choices=families)
    p.add_argument("n", type=int)
    p.add_argument("--partition", choices=["default"], default=None)
    p.add_argument("--normalize", action="store_true", help="canonical renumbered form")
    p.add_argument("--format", choices=["qdimacs", "stats-kv"], default="qdimacs")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("prove", help="build a refutation for a family instance")
    p.add_argument("family", choices=families)
    p.add_argument("n", type=int)
    p.add_argument("--mode", choices=list(MODES), default="plain")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_prove)

    def proof_args(p):
        p.add_argument("proof", nargs="?", default="-", help="proof file (default stdin)")
        p.add_argument("-f", "--formula", default=None, help="QDIMACS file")

    p = sub.add_parser("check", help="replay a proof against a rule set")
    proof_args(p)
    p.add_argument("--mode", choices=list(MODES), default="plain")
    p.add_argument("--regular", action="store_true")
    p.add_argument("--invariant", action="store_true", help="also check the semantic line invariant")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("invariant", help="exhaustively check the per-line invariant")
    proof_args(p)
    p.add_argument("--max-vars", type=int, default=20)
    p.set_defaults(func=cmd_invariant)

    p = sub.add_parser("verify-strategy", help="verify the extracted strategy wins")
    proof_args(p)
    p.add_argument("--max-vars", type=int, default=24)
    p.set_defaults(func=cmd_verify_strategy)

    p = sub.add_parser("restrict", help="apply var=0/1 assignments to existentials")
    p.add_argument("formula")
    p.add_argument("assignment", help="comma-separated var=0/1 tokens")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--format", choices=["qdimacs", "stats-kv"], default="qdimacs")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_restrict)

    p = sub.add_parser("oracle", help="brute-force game evaluation")
    p.add_argument("formula")
    p.add_argument("--max-vars", type=int, default=24)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("stats", help="proof statistics")
    proof_args(p)
    p.add_argument("--format", choices=["stats-kv"], default="stats-kv")
    p.add_argument("--dump-maps", action="store_true", help="dump final-line merge-maps")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("export-circuit", help="emit the strategy circuit of a refutation")
    proof_args(p)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_export_circuit)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        UsageError,
        FormulaError,
        QDimacsError,
        ProofFormatError,
        ProofMismatchError,
        ProofStepError,
        NotARefutationError,
        BudgetExceededError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
