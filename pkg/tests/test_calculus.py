import itertools

import pytest

from conftest import make_example1, make_example1_proof

from mres.calculus import (
    Axiom,
    BlockedResolutionError,
    CheckerConfig,
    Proof,
    ProofLine,
    ProofStepError,
    Resolve,
    RuleError,
    WeakenExist,
    WeakenStrategy,
    axiom_line,
    check_line_invariant,
    check_proof,
    config_for_mode,
    extract_strategy,
    first_invariant_violation,
    line_invariant_holds,
    replay,
    resolve_lines,
    weaken_exist,
    weaken_strategy,
)
from mres.families import Family, gen
from mres.formula import EXISTS, FORALL, PCNF, QuantBlock
from mres.mergemap import (
    MergeMap,
    NodeTable,
    build_parity_map,
    constant_map,
    is_isomorphic,
    trivial_map,
)
from mres.semantics import BudgetExceededError


# -- axiom download -----------------------------------------------------------


def test_axiom_lines_of_example1(example1):
    table = NodeTable()
    line0 = axiom_line(example1, table, 0)  # (x | u | t)
    assert line0.clause == frozenset({1, 3})
    assert line0.map_for(2).constant_value() is False
    line1 = axiom_line(example1, table, 1)  # (-x | -u | t)
    assert line1.clause == frozenset({-1, 3})
    assert line1.map_for(2).constant_value() is True


def test_axiom_line_purely_existential_all_trivial():
    f = gen(Family.EQ2, 1)
    table = NodeTable()
    line = axiom_line(f, table, len(f.matrix) - 1)  # the long negated-t clause
    assert line.clause == frozenset({-5})
    assert line.maps == {}
    assert line.map_for(3).is_trivial and line.map_for(4).is_trivial


def test_axiom_line_rejects_universal_in_both_polarities():
    f = PCNF(
        [QuantBlock(EXISTS, (1,)), QuantBlock(FORALL, (2,))],
        [[1, 2, -2]],
    )
    table = NodeTable()
    with pytest.raises(RuleError):
        axiom_line(f, table, 0)


def test_axiom_line_bad_index(example1):
    with pytest.raises(RuleError):
        axiom_line(example1, NodeTable(), 17)


# -- resolution ---------------------------------------------------------------


def test_example1_resolutions(example1):
    f = example1
    table = NodeTable()
    l0 = axiom_line(f, table, 0)
    l1 = axiom_line(f, table, 1)
    r = resolve_lines(f, l0, l1, 1)
    assert r.clause == frozenset({3})
    m = r.map_for(2)
    assert m.evaluate({1: False}) is False and m.evaluate({1: True}) is True

    l2 = axiom_line(f, table, 2)
    l3 = axiom_line(f, table, 3)
    r2 = resolve_lines(f, l2, l3, 1)
    assert r2.clause == frozenset({-3})
    # isomorphic u-maps: the final resolution is allowed and keeps u = x
    empty = resolve_lines(f, r, r2, 3)
    assert empty.clause == frozenset()
    assert is_isomorphic(empty.map_for(2), m)


def test_resolve_pivot_polarity_errors(example1):
    f = example1
    table = NodeTable()
    l0 = axiom_line(f, table, 0)
    l1 = axiom_line(f, table, 1)
    with pytest.raises(RuleError):
        resolve_lines(f, l1, l0, 1)  # swapped orientation
    with pytest.raises(RuleError):
        resolve_lines(f, l0, l1, 3)  # pivot not in premises with both signs
    with pytest.raises(RuleError):
        resolve_lines(f, l0, l1, 2)  # universal pivot


def test_resolve_blocked_when_pivot_after_universal():
    # exists x forall u exists t, maps u=x vs u=-x, pivot t after u
    f = make_example1()
    table = NodeTable()
    u_eq_x = MergeMap(2, table, table.query(1, table.leaf(False), table.leaf(True)))
    u_ne_x = MergeMap(2, table, table.query(1, table.leaf(True), table.leaf(False)))
    l1 = ProofLine(frozenset({3}), {2: u_eq_x})
    l2 = ProofLine(frozenset({-3}), {2: u_ne_x})
    with pytest.raises(BlockedResolutionError) as err:
        resolve_lines(f, l1, l2, 3)
    assert err.value.universal == 2


def micro_formula():
    # exists e1 forall u1 exists e2 forall u2 exists e3
    return PCNF(
        [
            QuantBlock(EXISTS, (1,)),
            QuantBlock(FORALL, (2,)),
            QuantBlock(EXISTS, (3,)),
            QuantBlock(FORALL, (4,)),
            QuantBlock(EXISTS, (5,)),
        ],
        [],
    )


def micro_map_pool(table, owner, exist_before):
    pool = [
        trivial_map(owner),
        constant_map(table, owner, False),
        constant_map(table, owner, True),
    ]
    for v in exist_before:
        pool.append(MergeMap(owner, table, table.query(v, table.leaf(False), table.leaf(True))))
        pool.append(MergeMap(owner, table, table.query(v, table.leaf(True), table.leaf(False))))
    return pool


def test_blocked_exactly_characterized_on_micro_instances():
    """BLOCKED(u) is raised iff some universal before the pivot has two
    non-trivial, non-isomorphic maps, and it names the earliest such u."""
    f = micro_formula()
    table = NodeTable()
    pool1 = micro_map_pool(table, 2, [1])
    pool2 = micro_map_pool(table, 4, [1, 3])
    checked = blocked = 0
    for pivot in (1, 3, 5):
        for m1a, m2a in itertools.product(pool1, pool1):
            for m1b, m2b in itertools.product(pool2, pool2):
                left = ProofLine(
                    frozenset({pivot}),
                    {u: m for u, m in ((2, m1a), (4, m1b)) if not m.is_trivial},
                )
                right = ProofLine(
                    frozenset({-pivot}),
                    {u: m for u, m in ((2, m2a), (4, m2b)) if not m.is_trivial},
                )
                expected = None
                for u, ma, mb in ((2, m1a, m2a), (4, m1b, m2b)):
                    if f.precedes(u, pivot) and not ma.is_trivial and not mb.is_trivial \
                            and not is_isomorphic(ma, mb):
                        expected = u
                        break
                checked += 1
                if expected is None:
                    resolve_lines(f, left, right, pivot)
                else:
                    blocked += 1
                    with pytest.raises(BlockedResolutionError) as err:
                        resolve_lines(f, left, right, pivot)
                    assert err.value.universal == expected
    assert checked == 3 * 25 * 49
    assert blocked > 0


def test_resolve_case_order_prefers_left_on_isomorphic():
    f = micro_formula()
    table = NodeTable()
    m = MergeMap(4, table, table.query(3, table.leaf(False), table.leaf(True)))
    left = ProofLine(frozenset({5}), {4: m})
    right = ProofLine(frozenset({-5}), {4: m})
    out = resolve_lines(f, left, right, 5)
    assert out.map_for(4).root == m.root


def test_resolve_merges_after_pivot():
    f = micro_formula()
    table = NodeTable()
    c0 = constant_map(table, 4, False)
    c1 = constant_map(table, 4, True)
    left = ProofLine(frozenset({3}), {4: c0})
    right = ProofLine(frozenset({-3}), {4: c1})
    out = resolve_lines(f, left, right, 3)
    m = out.map_for(4)
    assert m.evaluate({3: False}) is False and m.evaluate({3: True}) is True


# -- weakenings -----------------------------------------------------------------


def test_weaken_exist_basics(example1):
    f = micro_formula()
    table = NodeTable()
    line = ProofLine(frozenset({3}), {2: constant_map(table, 2, False)})
    out = weaken_exist(f, line, 5)
    assert out.clause == frozenset({3, 5})
    assert out.maps == line.maps
    # idempotent on an already-present literal
    again = weaken_exist(f, out, 5)
    assert again.clause == out.clause
    with pytest.raises(RuleError):
        weaken_exist(f, line, -3)  # complement present
    with pytest.raises(RuleError):
        weaken_exist(example1, axiom_line(example1, table, 0), 2)  # universal


def test_weaken_strategy_basics():
    f = gen(Family.HEQ2, 2)
    eq = gen(Family.EQ2, 2)
    u1, v1 = 5, 7  # 2n+1 and 3n+1 for n=2
    table = NodeTable()
    # region-0 cell (1,1): clause (x1 | -y1 | u1 | t11) has index 1
    hline = axiom_line(f, table, 1)
    assert hline.map_for(u1).constant_value() is False
    assert hline.map_for(v1).is_trivial  # v1 literal was dropped
    out = weaken_strategy(f, table, hline, v1, True)
    assert out.clause == hline.clause
    assert out.map_for(v1).constant_value() is True
    # matches the corresponding full-grid axiom line (x1 | -y1 | u1 | -v1 | t11)
    eq_line = axiom_line(eq, NodeTable(), 1)
    assert eq_line.clause == out.clause
    assert is_isomorphic(eq_line.map_for(u1), out.map_for(u1))
    assert is_isomorphic(eq_line.map_for(v1), out.map_for(v1))
    # errors: non-trivial target, re-weakening, existential target
    with pytest.raises(RuleError):
        weaken_strategy(f, table, hline, u1, True)
    with pytest.raises(RuleError):
        weaken_strategy(f, table, out, v1, False)
    with pytest.raises(RuleError):
        weaken_strategy(f, table, hline, 1, True)


# -- checker --------------------------------------------------------------------


def test_check_example1_proof(example1, example1_proof):
    report = check_proof(example1, example1_proof, config_for_mode("plain"))
    assert report.valid
    assert report.is_refutation and report.final_clause_empty
    assert report.num_lines == 7
    assert report.rule_counts == {
        "axiom": 4,
        "resolve": 3,
        "weaken_exist": 0,
        "weaken_strategy": 0,
    }
    assert report.regular is True
    assert report.max_map_nodes == 3  # u = x: one query node, two leaves
    # two resolutions on x (distinct paths), one on t
    pivots = [s.pivot for s in example1_proof.steps if isinstance(s, Resolve)]
    assert sorted(pivots) == [1, 1, 3]
    assert report.verdict() == "valid refutation"


def test_check_reports_offending_step(example1):
    bad = Proof(example1, [Axiom(0), Axiom(1), Resolve(2, 1, 1)])  # swapped refs
    report = check_proof(example1, bad, config_for_mode("plain"))
    assert not report.valid
    assert report.failed_step == 3
    assert "pivot" in report.failure_reason


def test_check_rejects_forward_reference(example1):
    bad = Proof(example1, [Axiom(0), Resolve(1, 3, 1), Axiom(1)])
    report = check_proof(example1, bad, config_for_mode("plain"))
    assert not report.valid and report.failed_step == 2


def test_check_gates_weakening_rules(example1):
    f = example1
    p = Proof(f, [Axiom(0), WeakenExist(1, 1)])  # idempotent but still gated
    assert not check_proof(f, p, config_for_mode("plain")).valid
    assert check_proof(f, p, config_for_mode("we")).valid
    p2 = Proof(f, [Axiom(3), WeakenStrategy(1, 2, True)])
    # clause 3 constrains u already; use a formula line with a trivial map
    report = check_proof(f, p2, config_for_mode("wf"))
    assert not report.valid  # map not trivial
    f2 = gen(Family.EQ2, 1)
    p3 = Proof(f2, [Axiom(4), WeakenStrategy(1, 3, False)])
    assert not check_proof(f2, p3, config_for_mode("plain")).valid
    assert not check_proof(f2, p3, config_for_mode("we")).valid
    assert check_proof(f2, p3, config_for_mode("wf")).valid
    assert check_proof(f2, p3, config_for_mode("wef")).valid


def test_derivation_verdict_for_nonrefutation(example1):
    p = Proof(example1, [Axiom(0), Axiom(1), Resolve(1, 2, 1)])
    report = check_proof(example1, p, config_for_mode("plain"))
    assert report.valid and not report.final_clause_empty
    assert report.verdict() == "valid derivation, not a refutation"


def irregular_proof():
    # exists x,a with clauses (x|a)(-x|a)(-a|x)(-a|-x): deriving (a) uses
    # pivot x, and the final clash on x sits above it on the same path
    f = PCNF([QuantBlock(EXISTS, (1, 2))], [[1, 2], [-1, 2], [-2, 1], [-2, -1]])
    steps = [
        Axiom(0),
        Axiom(1),
        Resolve(1, 2, 1),  # (a)
        Axiom(2),
        Resolve(3, 4, 2),  # (x)
        Axiom(3),
        Resolve(3, 6, 2),  # (-x), reusing line 3
        Resolve(5, 7, 1),  # box; pivot x already used below both premises
    ]
    return f, Proof(f, steps)


def test_regularity_enforcement():
    f, p = irregular_proof()
    plain = check_proof(f, p, config_for_mode("plain"))
    assert plain.valid and plain.final_clause_empty
    assert plain.regular is False
    strict = check_proof(f, p, config_for_mode("plain", regular=True))
    assert not strict.valid
    assert strict.failed_step == 8
    assert "irregular" in strict.failure_reason


def test_weakening_steps_do_not_add_pivots(example1):
    # a weakening between two resolutions extends the path without
    # contributing a pivot, so regularity is judged on resolutions alone
    f = example1
    steps = [
        Axiom(0),
        Axiom(1),
        Resolve(1, 2, 1),  # (t, u=x)
        WeakenExist(3, 1),  # (x | t, u=x)
        Axiom(2),
        Axiom(3),
        Resolve(5, 6, 1),  # (-t, u=x)
        Resolve(4, 7, 3),  # (x, u=x)
    ]
    p = Proof(f, steps)
    report = check_proof(f, p, config_for_mode("we", regular=True))
    assert report.valid and report.regular and not report.final_clause_empty


def test_tautology_policy():
    f = PCNF([QuantBlock(EXISTS, (1, 2))], [[1, -1, 2]])
    p = Proof(f, [Axiom(0)])
    assert check_proof(f, p, config_for_mode("plain")).valid
    cfg = CheckerConfig(forbid_tautologies=True)
    report = check_proof(f, p, cfg)
    assert not report.valid and "tautological" in report.failure_reason
    # regular mode also forbids tautological clause parts
    report2 = check_proof(f, p, config_for_mode("plain", regular=True))
    assert not report2.valid


def test_replay_determinism(example1, example1_proof):
    lines_a = replay(example1, example1_proof)
    lines_b = replay(example1, example1_proof)
    assert len(lines_a) == len(lines_b)
    for a, b in zip(lines_a, lines_b):
        assert a.clause == b.clause
        assert set(a.maps) == set(b.maps)
        for u in a.maps:
            assert is_isomorphic(a.maps[u], b.maps[u])


def test_checker_semantic_invariant_mode(example1, example1_proof):
    cfg = CheckerConfig(semantic_invariant="exhaustive")
    assert check_proof(example1, example1_proof, cfg).valid


# -- line invariant ------------------------------------------------------------


def test_invariant_holds_for_example1(example1, example1_proof):
    assert check_line_invariant(example1, example1_proof) is True


def test_invariant_fails_for_flipped_axiom_constant(example1, example1_proof):
    lines = replay(example1, example1_proof)
    table = NodeTable()
    # flip the constant map of the first axiom line: u=0 becomes u=1
    corrupted = ProofLine(lines[0].clause, {2: constant_map(table, 2, True)})
    lines[0] = corrupted
    assert line_invariant_holds(example1, corrupted) is False
    assert first_invariant_violation(example1, lines) == 1


def test_invariant_budget():
    f = gen(Family.KBKF_LQ_WEAK, 7)  # 21 existentials
    p = Proof(f, [Axiom(0)])
    with pytest.raises(BudgetExceededError):
        check_line_invariant(f, p, max_existentials=20)


def test_invariant_vacuous_on_tautological_line():
    f = PCNF([QuantBlock(EXISTS, (1, 2))], [[1, -1, 2]])
    assert check_line_invariant(f, Proof(f, [Axiom(0)])) is True


# -- strategy extraction ---------------------------------------------------------


def test_extract_strategy_example1(example1, example1_proof):
    strategy = extract_strategy(example1, example1_proof)
    assert set(strategy) == {2}
    m = strategy[2]
    assert m.evaluate({1: False}) is False and m.evaluate({1: True}) is True


def test_extract_strategy_requires_refutation(example1):
    from mres.calculus import NotARefutationError

    p = Proof(example1, [Axiom(0)])
    with pytest.raises(NotARefutationError):
        extract_strategy(example1, p)
