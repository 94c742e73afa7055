"""Prenex CNF formulas with a quantifier prefix over a clause matrix.

Conventions (QDIMACS-style):
  * a variable is a positive integer,
  * a literal is a signed integer (+v for the variable, -v for its negation),
  * a clause is a frozenset of literals,
  * the prefix is a sequence of quantifier blocks with strictly alternating
    quantifiers.

Formulas are immutable after construction; all operations return new objects.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

EXISTS = "e"
FORALL = "a"


class FormulaError(ValueError):
    """Raised for structurally invalid formulas or bad formula operations."""


def variable(lit: int) -> int:
    return abs(lit)


def complement(lit: int) -> int:
    return -lit


def clause(literals: Iterable[int]) -> frozenset[int]:
    """Build a clause; duplicate literals collapse under set semantics."""
    cl = frozenset(literals)
    if 0 in cl:
        raise FormulaError("0 is not a literal")
    return cl


def is_tautological(cl: frozenset[int]) -> bool:
    """A clause containing some variable in both polarities."""
    return any(-lit in cl for lit in cl)


def sorted_literals(cl: Iterable[int]) -> tuple[int, ...]:
    """Canonical literal order: by variable, positive before negative."""
    return tuple(sorted(cl, key=lambda lit: (abs(lit), lit < 0)))


@dataclass(frozen=True)
class QuantBlock:
    quantifier: str  # EXISTS or FORALL
    variables: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.quantifier not in (EXISTS, FORALL):
            raise FormulaError(f"unknown quantifier {self.quantifier!r}")
        if not self.variables:
            raise FormulaError("empty quantifier block")
        if any(v <= 0 for v in self.variables):
            raise FormulaError("variables must be positive integers")


class PCNF:
    """A prenex CNF formula.

    Adjacent blocks with the same quantifier are merged on construction, so
    the stored prefix always alternates. Every variable occurring in the
    matrix must be quantified (no free variables). Clause order is preserved
    as given.
    """

    __slots__ = ("prefix", "matrix", "names", "_position", "_quant")

    def __init__(
        self,
        prefix: Sequence[QuantBlock],
        matrix: Iterable[Iterable[int]],
        names: Optional[Mapping[int, str]] = None,
    ) -> None:
        merged: list[tuple[str, list[int]]] = []
        for block in prefix:
            if merged and merged[-1][0] == block.quantifier:
                merged[-1][1].extend(block.variables)
            else:
                merged.append((block.quantifier, list(block.variables)))
        self.prefix: tuple[QuantBlock, ...] = tuple(
            QuantBlock(q, tuple(vs)) for q, vs in merged
        )

        position: dict[int, int] = {}
        quant: dict[int, str] = {}
        for block in self.prefix:
            for v in block.variables:
                if v in position:
                    raise FormulaError(f"variable {v} quantified twice")
                position[v] = len(position)
                quant[v] = block.quantifier
        self._position = position
        self._quant = quant

        self.matrix: tuple[frozenset[int], ...] = tuple(clause(c) for c in matrix)
        for i, cl in enumerate(self.matrix):
            for lit in cl:
                if abs(lit) not in quant:
                    raise FormulaError(f"free variable {abs(lit)} in clause {i}")

        self.names: dict[int, str] = dict(names) if names else {}

    # -- queries ---------------------------------------------------------

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(v for block in self.prefix for v in block.variables)

    @property
    def existentials(self) -> tuple[int, ...]:
        return tuple(
            v
            for block in self.prefix
            if block.quantifier == EXISTS
            for v in block.variables
        )

    @property
    def universals(self) -> tuple[int, ...]:
        return tuple(
            v
            for block in self.prefix
            if block.quantifier == FORALL
            for v in block.variables
        )

    def quantifier_of(self, v: int) -> str:
        try:
            return self._quant[v]
        except KeyError:
            raise FormulaError(f"variable {v} not in prefix") from None

    def is_existential(self, v: int) -> bool:
        return self.quantifier_of(v) == EXISTS

    def is_universal(self, v: int) -> bool:
        return self.quantifier_of(v) == FORALL

    def position(self, v: int) -> int:
        """Left-to-right index of v in the flattened prefix."""
        try:
            return self._position[v]
        except KeyError:
            raise FormulaError(f"variable {v} not in prefix") from None

    def precedes(self, a: int, b: int) -> bool:
        return self.position(a) < self.position(b)

    def name(self, v: int) -> str:
        return self.names.get(v, f"v{v}")

    # -- equality (structural; names are presentation metadata) ----------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PCNF):
            return NotImplemented
        return self.prefix == other.prefix and self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash((self.prefix, self.matrix))

    def __repr__(self) -> str:
        return f"PCNF({len(self.variables)} vars, {len(self.matrix)} clauses)"


def restrict(f: PCNF, rho: Mapping[int, bool]) -> PCNF:
    """Apply a partial assignment to existential variables.

    Clauses with a satisfied literal disappear, falsified literals are
    dropped from the remaining clauses, and the assigned variables leave the
    prefix (empty blocks vanish, adjacent blocks re-merge). Variables of rho
    absent from the prefix are ignored, which makes restriction by a fixed
    rho idempotent. Assigning a universal variable is an error.
    """
    for v in rho:
        if v in f._quant and f.is_universal(v):
            raise FormulaError(f"cannot restrict universal variable {v}")
    assigned = {v: bool(b) for v, b in rho.items() if v in f._quant}

    new_matrix: list[frozenset[int]] = []
    for cl in f.matrix:
        satisfied = False
        kept: list[int] = []
        for lit in cl:
            v = abs(lit)
            if v in assigned:
                if (lit > 0) == assigned[v]:
                    satisfied = True
                    break
            else:
                kept.append(lit)
        if not satisfied:
            new_matrix.append(frozenset(kept))

    new_prefix: list[QuantBlock] = []
    for block in f.prefix:
        vs = tuple(v for v in block.variables if v not in assigned)
        if vs:
            new_prefix.append(QuantBlock(block.quantifier, vs))
    names = {v: s for v, s in f.names.items() if v not in assigned}
    return PCNF(new_prefix, new_matrix, names)


def normalize(f: PCNF) -> PCNF:
    """Canonical form for structural comparisons.

    Variables are renumbered 1..N in prefix order and clauses are sorted by
    their canonical literal tuple, so two formulas that agree up to variable
    numbering and clause order normalize to equal objects (and to identical
    QDIMACS bytes).
    """
    renumber = {v: i + 1 for i, v in enumerate(f.variables)}
    prefix = [
        QuantBlock(b.quantifier, tuple(renumber[v] for v in b.variables))
        for b in f.prefix
    ]
    matrix = [
        frozenset((1 if lit > 0 else -1) * renumber[abs(lit)] for lit in cl)
        for cl in f.matrix
    ]
    matrix.sort(key=sorted_literals)
    names = {renumber[v]: s for v, s in f.names.items()}
    return PCNF(prefix, matrix, names)


def equivalent(f: PCNF, g: PCNF) -> bool:
    """Equality up to variable renumbering and clause/literal order."""
    return normalize(f) == normalize(g)
