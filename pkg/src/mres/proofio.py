"""Text formats for proofs and exported strategy circuits.

Proof file format, one step per line, ids assigned 1..k in order:

    c <comment>
    p mresproof <formula-hash> <#steps>
    A <id> <clauseIndex>          axiom download (1-based clause index)
    R <id> <leftId> <rightId> <pivotVarIndex>
    WE <id> <srcId> <+/-litIndex>
    WF <id> <srcId> <uVarIndex> <0|1>

The header hash ties a proof to its formula (see qdimacs.formula_hash), so
checking a proof against the wrong formula fails fast. Clause indices are
1-based on disk, 0-based in the API.

Circuit export, for the final line of a refutation:

    gate s_<u>_<node> = const <0|1>
    gate s_<u>_<node> = mux(x<var>, s_<u>_<ifFalse>, s_<u>_<ifTrue>)
    output u<idx> = s_<u>_<root>

where mux(x, a, b) selects a when x=0 and b when x=1. Gates appear children
first, so a single forward pass evaluates the circuit.
"""

from __future__ import annotations

from typing import Iterable, Optional, Union

from .calculus import (
    Axiom,
    Proof,
    Resolve,
    Step,
    WeakenExist,
    WeakenStrategy,
    extract_strategy,
)
from .formula import PCNF
from .qdimacs import formula_hash


class ProofFormatError(ValueError):
    """Malformed proof file."""


class ProofMismatchError(ValueError):
    """Proof header hash does not match the formula."""


def write_proof(proof: Proof, comments: Iterable[str] = ()) -> str:
    lines = [f"c {c}" if c else "c" for c in comments]
    lines.append(f"p mresproof {formula_hash(proof.formula)} {len(proof.steps)}")
    for step_id, step in enumerate(proof.steps, start=1):
        if isinstance(step, Axiom):
            lines.append(f"A {step_id} {step.clause_index + 1}")
        elif isinstance(step, Resolve):
            lines.append(f"R {step_id} {step.left} {step.right} {step.pivot}")
        elif isinstance(step, WeakenExist):
            lines.append(f"WE {step_id} {step.source} {step.literal}")
        elif isinstance(step, WeakenStrategy):
            lines.append(
                f"WF {step_id} {step.source} {step.universal} {int(step.value)}"
            )
        else:
            raise ProofFormatError(f"unknown step kind {type(step).__name__}")
    return "\n".join(lines) + "\n"


def proof_file_comments(text: Union[str, bytes]) -> list[str]:
    """All comment lines (without the leading `c`), e.g. family metadata."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    out = []
    for raw in text.splitlines():
        line = raw.strip()
        if line == "c":
            out.append("")
        elif line.startswith("c "):
            out.append(line[2:])
    return out


def parse_proof(
    text: Union[str, bytes],
    formula: PCNF,
    require_hash_match: bool = True,
) -> Proof:
    if isinstance(text, bytes):
        text = text.decode("utf-8")

    declared: Optional[int] = None
    steps: list[Step] = []

    def ints(tokens: list[str], lineno: int) -> list[int]:
        try:
            return [int(t) for t in tokens]
        except ValueError:
            raise ProofFormatError(f"line {lineno}: expected integers") from None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tokens = line.split()
        kind = tokens[0]

        if kind == "p":
            if declared is not None:
                raise ProofFormatError(f"line {lineno}: duplicate header")
            if len(tokens) != 4 or tokens[1] != "mresproof":
                raise ProofFormatError(f"line {lineno}: malformed header")
            if require_hash_match and tokens[2] != formula_hash(formula):
                raise ProofMismatchError(
                    f"proof is for formula {tokens[2]}, got {formula_hash(formula)}"
                )
            declared = ints(tokens[3:], lineno)[0]
            continue

        if declared is None:
            raise ProofFormatError(f"line {lineno}: step before header")

        expected_id = len(steps) + 1
        if kind == "A":
            if len(tokens) != 3:
                _bad(lineno)
            step_id, clause_index = ints(tokens[1:], lineno)
            step: Step = Axiom(clause_index - 1)
        elif kind == "R":
            if len(tokens) != 5:
                _bad(lineno)
            step_id, left, right, pivot = ints(tokens[1:], lineno)
            step = Resolve(left, right, pivot)
        elif kind == "WE":
            if len(tokens) != 4:
                _bad(lineno)
            step_id, source, literal = ints(tokens[1:], lineno)
            step = WeakenExist(source, literal)
        elif kind == "WF":
            if len(tokens) != 5:
                _bad(lineno)
            step_id, source, universal, value = ints(tokens[1:], lineno)
            if value not in (0, 1):
                raise ProofFormatError(f"line {lineno}: WF value must be 0 or 1")
            step = WeakenStrategy(source, universal, bool(value))
        else:
            raise ProofFormatError(f"line {lineno}: unknown step kind {kind!r}")

        if step_id != expected_id:
            raise ProofFormatError(
                f"line {lineno}: expected step id {expected_id}, got {step_id}"
            )
        steps.append(step)

    if declared is None:
        raise ProofFormatError("missing header line")
    if len(steps) != declared:
        raise ProofFormatError(f"declared {declared} steps but found {len(steps)}")
    return Proof(formula, steps)


def _bad(lineno: int):
    raise ProofFormatError(f"line {lineno}: wrong number of fields")


def export_strategy_circuit(f: PCNF, proof: Proof) -> str:
    """Gate definitions for every program map in a refutation's final line.

    Each program node becomes one extension gate; trivial maps contribute
    nothing (the universal stays a free input).
    """
    strategy = extract_strategy(f, proof)
    lines: list[str] = []
    for u in f.universals:
        m = strategy[u]
        if m.is_trivial:
            continue
        for nid in m.table.reachable(m.root):
            node = m.table.node(nid)
            if node[0] == "leaf":
                lines.append(f"gate s_{u}_{nid} = const {int(node[1])}")
            else:
                _, var, lo, hi = node
                lines.append(f"gate s_{u}_{nid} = mux(x{var}, s_{u}_{lo}, s_{u}_{hi})")
        lines.append(f"output u{u} = s_{u}_{m.root}")
    return "\n".join(lines) + "\n" if lines else ""
