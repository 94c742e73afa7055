"""Brute-force game semantics for small QBFs.

Two oracles live here: a recursive two-player game evaluation of a formula,
and an exhaustive check that a collection of merge-maps is a winning
strategy for the universal player. Both are desk-scale tools guarded by
variable budgets.

The exhaustive checks enumerate assignments bit-parallel: each variable is
represented by a big integer whose bit a is the variable's value in
assignment number a, so clause falsification over all 2^k assignments is a
handful of integer operations.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from .formula import EXISTS, PCNF
from .mergemap import MergeMap


class BudgetExceededError(RuntimeError):
    """Input too large for an exhaustive oracle."""


def eval_qbf(f: PCNF, max_vars: int = 24) -> bool:
    """True iff the existential player wins the evaluation game.

    Recursive descent in prefix order with clause simplification and
    memoization on the residual matrix. Intended for oracle duty on small
    instances only.
    """
    if len(f.variables) > max_vars:
        raise BudgetExceededError(
            f"{len(f.variables)} variables exceed the budget of {max_vars}"
        )
    order = [(v, q.quantifier) for q in f.prefix for v in q.variables]
    memo: dict[tuple[int, frozenset[frozenset[int]]], bool] = {}

    def assign(clauses: frozenset[frozenset[int]], v: int, value: bool):
        sat = v if value else -v
        out = []
        for cl in clauses:
            if sat in cl:
                continue
            if -sat in cl:
                cl = cl - {-sat}
            out.append(cl)
        return frozenset(out)

    def play(depth: int, clauses: frozenset[frozenset[int]]) -> bool:
        if not clauses:
            return True
        if frozenset() in clauses:
            return False
        key = (depth, clauses)
        got = memo.get(key)
        if got is not None:
            return got
        v, quant = order[depth]
        lo = play(depth + 1, assign(clauses, v, False))
        if quant == EXISTS:
            result = lo or play(depth + 1, assign(clauses, v, True))
        else:
            result = lo and play(depth + 1, assign(clauses, v, True))
        memo[key] = result
        return result

    return play(0, frozenset(f.matrix))


# -- bit-parallel assignment enumeration ---------------------------------


def _chessboard(i: int, k: int) -> int:
    """Truth table of enumerated variable i over all 2^k assignments."""
    seg = 1 << i
    pattern = ((1 << seg) - 1) << seg
    width = 2 * seg
    total = 1 << k
    while width < total:
        pattern |= pattern << width
        width *= 2
    return pattern


def _map_pattern(m: MergeMap, patterns: Mapping[int, int], full: int) -> int:
    """Truth table of a program map over enumerated assignments."""
    memo: dict[int, int] = {}

    def walk(nid: int) -> int:
        got = memo.get(nid)
        if got is not None:
            return got
        node = m.table.node(nid)
        if node[0] == "leaf":
            value = full if node[1] else 0
        else:
            _, var, lo, hi = node
            try:
                p = patterns[var]
            except KeyError:
                raise BudgetExceededError(
                    f"merge-map queries variable {var} outside the enumeration"
                ) from None
            value = (p & walk(hi)) | ((p ^ full) & walk(lo))
        memo[nid] = value
        return value

    return walk(m.root)


def every_assignment_falsifies(
    clauses: Sequence[frozenset[int]],
    fixed: Mapping[int, bool],
    enum_vars: Sequence[int],
    program_maps: Mapping[int, MergeMap],
) -> bool:
    """Does every enumerated assignment falsify at least one clause?

    `fixed` pins some variables, `enum_vars` range over all combinations,
    and each variable in `program_maps` takes the value its map computes
    from the others. All clause variables must be covered by one of the
    three groups.
    """
    k = len(enum_vars)
    full = (1 << (1 << k)) - 1
    patterns: dict[int, int] = {}
    for v, value in fixed.items():
        patterns[v] = full if value else 0
    for i, v in enumerate(enum_vars):
        patterns[v] = _chessboard(i, k)
    for v, m in program_maps.items():
        patterns[v] = _map_pattern(m, patterns, full)

    some_falsified = 0
    for cl in clauses:
        falsified = full
        for lit in cl:
            p = patterns[abs(lit)]
            falsified &= (p ^ full) if lit > 0 else p
            if not falsified:
                break
        some_falsified |= falsified
        if some_falsified == full:
            return True
    return some_falsified == full


def check_universal_strategy(
    f: PCNF,
    strategy: Mapping[int, MergeMap],
    max_existentials: int = 24,
) -> bool:
    """Exhaustively verify a universal winning strategy.

    For every total assignment of the existential variables, universals with
    a program map respond with the map's value; universals left trivial are
    quantified over both values. The strategy wins iff every such combined
    assignment falsifies some clause.
    """
    existentials = f.existentials
    if len(existentials) > max_existentials:
        raise BudgetExceededError(
            f"{len(existentials)} existentials exceed the budget of {max_existentials}"
        )

    programs: dict[int, MergeMap] = {}
    free_universals: list[int] = []
    for u in f.universals:
        m = strategy.get(u)
        if m is None or m.is_trivial:
            free_universals.append(u)
            continue
        if m.owner != u:
            raise ValueError(f"map for {u} has owner {m.owner}")
        for q in m.queried_variables():
            if not f.is_existential(q) or not f.precedes(q, u):
                raise ValueError(
                    f"map for {u} queries {q}, which is not an existential to its left"
                )
        programs[u] = m

    enum_vars = list(existentials) + free_universals
    return every_assignment_falsifies(f.matrix, {}, enum_vars, programs)
