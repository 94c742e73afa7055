"""The merge-resolution calculus: lines, rules, checker, strategy extraction.

A proof line pairs a clause over existential variables with one merge-map
per universal variable (trivial maps are stored implicitly). A proof is an
ordered list of rule applications from which the checker reconstructs every
line deterministically; the rule functions here are the single source of
truth for rule semantics.

Rules:
  * axiom: download a matrix clause; its existential part becomes the line
    clause and each universal literal becomes a constant map falsifying it.
  * resolve: clash two lines on an existential pivot (the left premise holds
    the positive pivot). For every universal quantified before the pivot the
    premise maps must be trivial on one side or isomorphic; maps of later
    universals may be combined by branching on the pivot.
  * existential clause weakening: add a non-contradicting existential
    literal to the clause.
  * strategy weakening: replace a trivial map by a constant one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from .formula import PCNF, is_tautological
from .mergemap import (
    MergeMap,
    NodeTable,
    constant_map,
    is_isomorphic,
    merge,
    trivial_map,
)
from .semantics import BudgetExceededError, every_assignment_falsifies


class RuleError(ValueError):
    """A rule application violating its side conditions."""


class BlockedResolutionError(RuleError):
    """Resolution blocked by a universal quantified before the pivot."""

    def __init__(self, universal: int):
        super().__init__(
            f"blocked at universal {universal}: maps are non-trivial and non-isomorphic"
        )
        self.universal = universal


class NotARefutationError(ValueError):
    """The final line's clause is not empty."""


class ProofStepError(ValueError):
    """Replay failed at a specific step (1-based id)."""

    def __init__(self, step: int, reason: str):
        super().__init__(f"step {step}: {reason}")
        self.step = step
        self.reason = reason


# -- proof objects --------------------------------------------------------


@dataclass(frozen=True)
class Axiom:
    clause_index: int  # 0-based index into the formula matrix


@dataclass(frozen=True)
class Resolve:
    left: int  # line id holding the positive pivot
    right: int
    pivot: int


@dataclass(frozen=True)
class WeakenExist:
    source: int
    literal: int


@dataclass(frozen=True)
class WeakenStrategy:
    source: int
    universal: int
    value: bool


Step = Union[Axiom, Resolve, WeakenExist, WeakenStrategy]

RULE_NAMES = {
    Axiom: "axiom",
    Resolve: "resolve",
    WeakenExist: "weaken_exist",
    WeakenStrategy: "weaken_strategy",
}


@dataclass
class Proof:
    """An ordered list of rule applications over a fixed formula.

    Line ids are 1-based: step k derives line k and may only reference
    earlier lines.
    """

    formula: PCNF
    steps: list[Step] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)


class ProofLine:
    """A derived line: existential clause plus per-universal merge-maps.

    Only non-trivial maps are stored; map_for returns a trivial marker for
    the rest.
    """

    __slots__ = ("clause", "maps")

    def __init__(self, clause: frozenset[int], maps: Mapping[int, MergeMap]):
        self.clause = clause
        self.maps = dict(maps)

    def map_for(self, u: int) -> MergeMap:
        m = self.maps.get(u)
        return m if m is not None else trivial_map(u)

    def __repr__(self) -> str:
        return f"ProofLine({sorted(self.clause, key=abs)}, {self.maps})"


# -- rule applications ----------------------------------------------------


def axiom_line(f: PCNF, table: NodeTable, clause_index: int) -> ProofLine:
    """Download a matrix clause as a proof line."""
    if not 0 <= clause_index < len(f.matrix):
        raise RuleError(f"no clause with index {clause_index}")
    axiom = f.matrix[clause_index]
    existential_part = []
    maps: dict[int, MergeMap] = {}
    for lit in axiom:
        v = abs(lit)
        if f.is_existential(v):
            existential_part.append(lit)
        else:
            if -lit in axiom:
                raise RuleError(
                    f"universal variable {v} occurs in both polarities; "
                    "no falsifying constant map exists"
                )
            # constant response falsifying the universal literal
            maps[v] = constant_map(table, v, lit < 0)
    return ProofLine(frozenset(existential_part), maps)


def resolve_lines(f: PCNF, left: ProofLine, right: ProofLine, pivot: int) -> ProofLine:
    """Resolve two lines; the left premise must hold the pivot positively."""
    if not f.is_existential(pivot):
        raise RuleError(f"pivot {pivot} is not existential")
    if pivot not in left.clause:
        raise RuleError(f"left premise does not contain pivot {pivot} positively")
    if -pivot not in right.clause:
        raise RuleError(f"right premise does not contain pivot {pivot} negatively")

    new_clause = (left.clause - {pivot}) | (right.clause - {-pivot})
    pivot_pos = f.position(pivot)
    maps: dict[int, MergeMap] = {}
    for u in f.universals:  # prefix order, so a blocked step names the earliest
        m1 = left.map_for(u)
        m2 = right.map_for(u)
        if m1.is_trivial:
            result = m2
        elif m2.is_trivial:
            result = m1
        elif is_isomorphic(m1, m2):
            result = m1
        elif pivot_pos < f.position(u):
            result = merge(f, pivot, m1, m2)
        else:
            raise BlockedResolutionError(u)
        if not result.is_trivial:
            maps[u] = result
    return ProofLine(new_clause, maps)


def weaken_exist(f: PCNF, line: ProofLine, literal: int) -> ProofLine:
    """Add an existential literal to the clause (idempotent; maps unchanged)."""
    v = abs(literal)
    if not f.is_existential(v):
        raise RuleError(f"cannot weaken with universal literal on {v}")
    if -literal in line.clause:
        raise RuleError(f"complementary literal {-literal} already present")
    return ProofLine(line.clause | {literal}, line.maps)


def weaken_strategy(
    f: PCNF, table: NodeTable, line: ProofLine, universal: int, value: bool
) -> ProofLine:
    """Replace the trivial map of a universal by a constant (clause unchanged)."""
    if not f.is_universal(universal):
        raise RuleError(f"{universal} is not a universal variable")
    if not line.map_for(universal).is_trivial:
        raise RuleError(f"map for {universal} is not trivial")
    maps = dict(line.maps)
    maps[universal] = constant_map(table, universal, value)
    return ProofLine(line.clause, maps)


# -- checking -------------------------------------------------------------


@dataclass
class CheckerConfig:
    allow_weaken_exist: bool = False
    allow_weaken_strategy: bool = False
    require_regular: bool = False
    forbid_tautologies: bool = False
    semantic_invariant: str = "off"  # "off" or "exhaustive"

    def __post_init__(self) -> None:
        if self.semantic_invariant not in ("off", "exhaustive"):
            raise ValueError("semantic_invariant must be 'off' or 'exhaustive'")


MODES = ("plain", "we", "wf", "wef")


def config_for_mode(mode: str, regular: bool = False) -> CheckerConfig:
    """plain / we / wf / wef rule sets, optionally with the regularity check."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    return CheckerConfig(
        allow_weaken_exist=mode in ("we", "wef"),
        allow_weaken_strategy=mode in ("wf", "wef"),
        require_regular=regular,
    )


PERMISSIVE = CheckerConfig(allow_weaken_exist=True, allow_weaken_strategy=True)


@dataclass
class CheckReport:
    valid: bool
    failed_step: Optional[int]
    failure_reason: Optional[str]
    num_steps: int
    num_lines: int
    rule_counts: dict[str, int]
    max_map_nodes: int
    final_clause_empty: bool
    regular: Optional[bool]  # None when replay did not finish

    @property
    def is_refutation(self) -> bool:
        return self.valid and self.final_clause_empty

    def verdict(self) -> str:
        if not self.valid:
            return "invalid"
        if self.final_clause_empty:
            return "valid refutation"
        return "valid derivation, not a refutation"


def replay(
    f: PCNF,
    proof: Proof,
    cfg: CheckerConfig = PERMISSIVE,
    table: Optional[NodeTable] = None,
) -> list[ProofLine]:
    """Reconstruct all lines, enforcing cfg; raises ProofStepError on failure.

    Regularity is tracked per line as the set of pivots used on any path
    below it (union of the premises' sets plus the step's own pivot);
    weakening steps extend paths but contribute no pivots. A tautological
    clause part is rejected when cfg forbids it and always under the
    regularity requirement.
    """
    table = table if table is not None else NodeTable()
    lines: list[ProofLine] = []
    pivot_sets: list[frozenset[int]] = []

    def line_ref(step_id: int, ref: int) -> ProofLine:
        if not 1 <= ref < step_id:
            raise ProofStepError(step_id, f"reference to line {ref} is out of range")
        return lines[ref - 1]

    for step_id, step in enumerate(proof.steps, start=1):
        try:
            if isinstance(step, Axiom):
                line = axiom_line(f, table, step.clause_index)
                pivots = frozenset()
            elif isinstance(step, Resolve):
                left = line_ref(step_id, step.left)
                right = line_ref(step_id, step.right)
                inherited = pivot_sets[step.left - 1] | pivot_sets[step.right - 1]
                if cfg.require_regular and step.pivot in inherited:
                    raise ProofStepError(
                        step_id,
                        f"irregular: pivot {step.pivot} already resolved on a path below",
                    )
                line = resolve_lines(f, left, right, step.pivot)
                pivots = inherited | {step.pivot}
            elif isinstance(step, WeakenExist):
                if not cfg.allow_weaken_exist:
                    raise ProofStepError(
                        step_id, "existential clause weakening not allowed by config"
                    )
                line = weaken_exist(f, line_ref(step_id, step.source), step.literal)
                pivots = pivot_sets[step.source - 1]
            elif isinstance(step, WeakenStrategy):
                if not cfg.allow_weaken_strategy:
                    raise ProofStepError(
                        step_id, "strategy weakening not allowed by config"
                    )
                line = weaken_strategy(
                    f, table, line_ref(step_id, step.source), step.universal, step.value
                )
                pivots = pivot_sets[step.source - 1]
            else:
                raise ProofStepError(step_id, f"unknown step kind {type(step).__name__}")
        except RuleError as exc:
            raise ProofStepError(step_id, str(exc)) from exc

        if (cfg.forbid_tautologies or cfg.require_regular) and is_tautological(
            line.clause
        ):
            raise ProofStepError(step_id, "tautological clause part")

        lines.append(line)
        pivot_sets.append(pivots)
    return lines


def is_regular(proof: Proof) -> bool:
    """Regularity verdict by pivot-set propagation, without other checks."""
    pivot_sets: list[frozenset[int]] = []
    for step in proof.steps:
        if isinstance(step, Axiom):
            pivots = frozenset()
        elif isinstance(step, Resolve):
            inherited = pivot_sets[step.left - 1] | pivot_sets[step.right - 1]
            if step.pivot in inherited:
                return False
            pivots = inherited | {step.pivot}
        else:
            pivots = pivot_sets[step.source - 1]
        pivot_sets.append(pivots)
    return True


def check_proof(f: PCNF, proof: Proof, cfg: CheckerConfig) -> CheckReport:
    """Replay every rule application and report; never raises on bad proofs."""
    rule_counts = {name: 0 for name in RULE_NAMES.values()}
    for step in proof.steps:
        name = RULE_NAMES.get(type(step))
        if name is not None:
            rule_counts[name] += 1

    try:
        lines = replay(f, proof, cfg)
    except ProofStepError as exc:
        return CheckReport(
            valid=False,
            failed_step=exc.step,
            failure_reason=exc.reason,
            num_steps=len(proof.steps),
            num_lines=len(proof.steps),
            rule_counts=rule_counts,
            max_map_nodes=0,
            final_clause_empty=False,
            regular=None,
        )

    max_nodes = 0
    counted: dict[int, int] = {}
    for line in lines:
        for m in line.maps.values():
            if m.root not in counted:
                counted[m.root] = m.node_count()
            max_nodes = max(max_nodes, counted[m.root])

    report = CheckReport(
        valid=bool(lines),
        failed_step=None if lines else 0,
        failure_reason=None if lines else "empty proof",
        num_steps=len(proof.steps),
        num_lines=len(lines),
        rule_counts=rule_counts,
        max_map_nodes=max_nodes,
        final_clause_empty=bool(lines) and not lines[-1].clause,
        regular=is_regular(proof),
    )

    if report.valid and cfg.semantic_invariant == "exhaustive":
        bad = first_invariant_violation(f, lines)
        if bad is not None:
            report.valid = False
            report.failed_step = bad
            report.failure_reason = "semantic line invariant violated"
    return report


# -- the per-line semantic invariant --------------------------------------


def line_invariant_holds(f: PCNF, line: ProofLine) -> bool:
    """Every total existential assignment falsifying the clause, extended by
    the map responses (trivial maps: both values), falsifies some axiom."""
    if is_tautological(line.clause):
        return True  # no falsifying assignment exists
    fixed = {abs(lit): lit < 0 for lit in line.clause}
    enum_vars = [e for e in f.existentials if e not in fixed]
    programs: dict[int, MergeMap] = {}
    for u in f.universals:
        m = line.map_for(u)
        if m.is_trivial:
            enum_vars.append(u)
        else:
            programs[u] = m
    return every_assignment_falsifies(f.matrix, fixed, enum_vars, programs)


def first_invariant_violation(f: PCNF, lines: list[ProofLine]) -> Optional[int]:
    for step_id, line in enumerate(lines, start=1):
        if not line_invariant_holds(f, line):
            return step_id
    return None


def check_line_invariant(f: PCNF, proof: Proof, max_existentials: int = 20) -> bool:
    """Replay the proof and test the semantic invariant on every line.

    Raises ProofStepError if the proof cannot be replayed at all and
    BudgetExceededError beyond the exhaustion budget.
    """
    if len(f.existentials) > max_existentials:
        raise BudgetExceededError(
            f"{len(f.existentials)} existentials exceed the budget of {max_existentials}"
        )
    lines = replay(f, proof)
    return first_invariant_violation(f, lines) is None


# -- strategy extraction ---------------------------------------------------


def extract_strategy(f: PCNF, proof: Proof) -> dict[int, MergeMap]:
    """The final line's map collection, one entry per universal variable.

    Trivial maps pass through as free-choice markers. Raises
    NotARefutationError when the final clause is not empty.
    """
    lines = replay(f, proof)
    if not lines:
        raise NotARefutationError("empty proof")
    final = lines[-1]
    if final.clause:
        raise NotARefutationError(
            f"final clause is not empty: {sorted(final.clause, key=abs)}"
        )
    return {u: final.map_for(u) for u in f.universals}
