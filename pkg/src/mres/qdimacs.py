"""QDIMACS reading and writing.

Accepted input: comment lines starting with `c`, a problem line
`p cnf <vars> <clauses>`, quantifier lines `e ... 0` / `a ... 0` before any
clause, and one zero-terminated clause per line. Free variables are
rejected: the calculus assumes a total prefix.
"""

from __future__ import annotations

import hashlib
from typing import Iterable, Union

from .formula import EXISTS, FORALL, PCNF, QuantBlock, sorted_literals


class QDimacsError(ValueError):
    """Malformed QDIMACS input."""


def parse_qdimacs(text: Union[str, bytes]) -> PCNF:
    if isinstance(text, bytes):
        text = text.decode("utf-8")

    num_vars = -1
    num_clauses = -1
    blocks: list[QuantBlock] = []
    matrix: list[list[int]] = []
    seen_clause = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue

        if num_vars < 0:
            tokens = line.split()
            if len(tokens) != 4 or tokens[0] != "p" or tokens[1] != "cnf":
                raise QDimacsError(f"line {lineno}: malformed problem line {line!r}")
            try:
                num_vars, num_clauses = int(tokens[2]), int(tokens[3])
            except ValueError:
                raise QDimacsError(f"line {lineno}: malformed problem line {line!r}") from None
            if num_vars < 0 or num_clauses < 0:
                raise QDimacsError(f"line {lineno}: negative counts in problem line")
            continue

        if line[0] in "ea":
            if seen_clause:
                raise QDimacsError(f"line {lineno}: quantifier line after clauses")
            tokens = line.split()
            try:
                values = [int(t) for t in tokens[1:]]
            except ValueError:
                raise QDimacsError(f"line {lineno}: bad quantifier line") from None
            if not values or values[-1] != 0:
                raise QDimacsError(f"line {lineno}: quantifier line not 0-terminated")
            vs = values[:-1]
            if not vs:
                raise QDimacsError(f"line {lineno}: empty quantifier block")
            for v in vs:
                if v <= 0 or v > num_vars:
                    raise QDimacsError(
                        f"line {lineno}: variable {v} out of range 1..{num_vars}"
                    )
            blocks.append(QuantBlock(EXISTS if line[0] == "e" else FORALL, tuple(vs)))
            continue

        try:
            values = [int(t) for t in line.split()]
        except ValueError:
            raise QDimacsError(f"line {lineno}: unexpected token on clause line") from None
        if not values or values[-1] != 0:
            raise QDimacsError(f"line {lineno}: unterminated clause")
        lits = values[:-1]
        if any(v == 0 for v in lits):
            raise QDimacsError(f"line {lineno}: embedded 0 inside clause")
        for lit in lits:
            if abs(lit) > num_vars:
                raise QDimacsError(
                    f"line {lineno}: variable {abs(lit)} above declared count {num_vars}"
                )
        matrix.append(lits)
        seen_clause = True

    if num_vars < 0:
        raise QDimacsError("missing problem line")
    if len(matrix) != num_clauses:
        raise QDimacsError(
            f"declared {num_clauses} clauses but found {len(matrix)}"
        )

    quantified = {v for b in blocks for v in b.variables}
    for lits in matrix:
        for lit in lits:
            if abs(lit) not in quantified:
                raise QDimacsError(f"free variable {abs(lit)}")

    return PCNF(blocks, matrix)


def write_qdimacs(f: PCNF, comments: Iterable[str] = ()) -> str:
    """Serialize to QDIMACS; parse_qdimacs(write_qdimacs(f)) == f.

    Literal order within a clause is canonical (by variable, positive
    first), so output is deterministic. Extra comment lines, if given, go
    above the problem line.
    """
    out: list[str] = [f"c {c}" if c else "c" for c in comments]
    max_var = max((v for b in f.prefix for v in b.variables), default=0)
    out.append(f"p cnf {max_var} {len(f.matrix)}")
    for block in f.prefix:
        out.append(f"{block.quantifier} {' '.join(str(v) for v in block.variables)} 0")
    for cl in f.matrix:
        lits = sorted_literals(cl)
        out.append((" ".join(str(lit) for lit in lits) + " 0").lstrip())
    return "\n".join(out) + "\n"


def formula_hash(f: PCNF) -> str:
    """Stable content hash used to tie proof files to their formula."""
    canon = write_qdimacs(f)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]
