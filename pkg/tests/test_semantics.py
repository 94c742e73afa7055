import itertools

import pytest

from conftest import make_example1

from mres.families import Family, gen
from mres.formula import EXISTS, FORALL, PCNF, QuantBlock
from mres.mergemap import NodeTable, MergeMap, build_parity_map, constant_map, trivial_map
from mres.semantics import (
    BudgetExceededError,
    check_universal_strategy,
    eval_qbf,
    every_assignment_falsifies,
)


def brute_force_eval(f: PCNF) -> bool:
    """Independent oracle: direct recursion over the prefix, no memo, no
    simplification. Only for tiny instances."""
    order = [(v, b.quantifier) for b in f.prefix for v in b.variables]

    def play(i, alpha):
        if i == len(order):
            return all(
                any(alpha[abs(l)] == (l > 0) for l in cl) for cl in f.matrix
            )
        v, q = order[i]
        results = (play(i + 1, {**alpha, v: val}) for val in (False, True))
        return any(results) if q == EXISTS else all(results)

    return play(0, {})


def test_eval_example1_false():
    assert eval_qbf(make_example1()) is False


def test_eval_trivially_true():
    f = PCNF([QuantBlock(EXISTS, (1,))], [[1]])
    assert eval_qbf(f) is True


def test_eval_no_clauses_true():
    f = PCNF([QuantBlock(FORALL, (1,))], [])
    assert eval_qbf(f) is True


def test_eval_empty_clause_false():
    f = PCNF([QuantBlock(EXISTS, (1,))], [[1], []])
    assert eval_qbf(f) is False


def test_eval_universal_flips_answer():
    t = PCNF([QuantBlock(EXISTS, (1,)), QuantBlock(FORALL, (2,))], [[1, 2], [1, -2]])
    assert eval_qbf(t) is True
    u = PCNF([QuantBlock(FORALL, (1,)), QuantBlock(EXISTS, (2,))], [[1, 2], [-1, -2], [1, -2]])
    assert eval_qbf(u) is False


def test_eval_agrees_with_naive_oracle_on_small_formulas():
    for fam, n in [(Family.KBKF_LQ, 1), (Family.KBKF_LQ_WEAK, 1), (Family.EQ2, 1), (Family.QPARITY, 2)]:
        f = gen(fam, n)
        assert eval_qbf(f) is brute_force_eval(f)


def test_eval_family_instances_false():
    cases = [
        (Family.KBKF_LQ, 2),
        (Family.KBKF_LQ_WEAK, 2),
        (Family.KBKF_LQ_SPLIT, 2),
        (Family.EQ2, 2),
        (Family.HEQ2, 2),
        (Family.MPARITY, 2),
        (Family.QPARITY, 3),
        (Family.LQPARITY, 3),
        (Family.QUPARITY, 3),
    ]
    for fam, n in cases:
        assert eval_qbf(gen(fam, n)) is False, f"{fam.value}[{n}] should be false"


def test_eval_budget():
    f = gen(Family.EQ2, 3)  # 21 variables
    with pytest.raises(BudgetExceededError):
        eval_qbf(f, max_vars=20)
    assert eval_qbf(f, max_vars=21) is False


# -- strategy checking --------------------------------------------------------


def u_equals_x_strategy(f, value_map=None):
    x, u = 1, 2
    table = NodeTable()
    root = (
        table.query(x, table.leaf(False), table.leaf(True))
        if value_map is None
        else table.query(x, table.leaf(True), table.leaf(False))
    )
    return {u: MergeMap(u, table, root)}


def test_example1_strategy_u_equals_x():
    f = make_example1()
    assert check_universal_strategy(f, u_equals_x_strategy(f)) is True


def test_example1_strategy_u_equals_not_x_fails():
    f = make_example1()
    assert check_universal_strategy(f, u_equals_x_strategy(f, value_map="neg")) is False


def test_example1_constant_strategies_fail():
    f = make_example1()
    table = NodeTable()
    for value in (False, True):
        assert check_universal_strategy(f, {2: constant_map(table, 2, value)}) is False


def test_kbkf_weak_strategy_x_equals_d():
    for n in (1, 2, 3, 4):
        f = gen(Family.KBKF_LQ_WEAK, n)
        table = NodeTable()
        strategy = {}
        for i in range(1, n + 1):
            d, x = 3 * i - 2, 3 * i
            strategy[x] = MergeMap(x, table, table.query(d, table.leaf(False), table.leaf(True)))
        assert check_universal_strategy(f, strategy) is True


def test_trivial_maps_are_universally_quantified():
    # exists x forall u. (x|u) & (-x|-u): for each x only one u-value
    # falsifies a clause, so the trivial map (which must win under every
    # completion) fails although the dependent response u=x wins
    f = PCNF(
        [QuantBlock(EXISTS, (1,)), QuantBlock(FORALL, (2,))],
        [[1, 2], [-1, -2]],
    )
    assert check_universal_strategy(f, {2: trivial_map(2)}) is False
    assert check_universal_strategy(f, {}) is False  # missing map = trivial
    table = NodeTable()
    u_eq_x = MergeMap(2, table, table.query(1, table.leaf(False), table.leaf(True)))
    assert check_universal_strategy(f, {2: u_eq_x}) is True
    u_neq_x = MergeMap(2, table, table.query(1, table.leaf(True), table.leaf(False)))
    assert check_universal_strategy(f, {2: u_neq_x}) is False
    assert eval_qbf(f) is False


def test_trivial_map_wins_when_every_completion_falsifies():
    # exists x forall u. (x) & (-x): x kills one clause whatever u does
    f = PCNF([QuantBlock(EXISTS, (1,)), QuantBlock(FORALL, (2,))], [[1], [-1]])
    assert check_universal_strategy(f, {}) is True


def test_strategy_checker_rejects_bad_maps():
    f = PCNF(
        [QuantBlock(EXISTS, (1,)), QuantBlock(FORALL, (2,)), QuantBlock(EXISTS, (3,))],
        [[1, 2, 3]],
    )
    table = NodeTable()
    late = MergeMap(2, table, table.query(3, table.leaf(False), table.leaf(True)))
    with pytest.raises(ValueError):
        check_universal_strategy(f, {2: late})  # queries a var right of u
    wrong_owner = constant_map(table, 3, True)
    with pytest.raises(ValueError):
        check_universal_strategy(f, {2: wrong_owner})


def test_strategy_checker_budget():
    f = gen(Family.KBKF_LQ_WEAK, 3)  # 9 existentials
    with pytest.raises(BudgetExceededError):
        check_universal_strategy(f, {}, max_existentials=8)


def test_strategy_agrees_with_eval(example1=None):
    # whenever some strategy verifies, the formula evaluates false
    f = make_example1()
    assert check_universal_strategy(f, u_equals_x_strategy(f)) is True
    assert eval_qbf(f) is False


# -- the bit-parallel kernel ---------------------------------------------------


def naive_every_assignment_falsifies(clauses, fixed, enum_vars, program_maps):
    for values in itertools.product((False, True), repeat=len(enum_vars)):
        alpha = dict(fixed)
        alpha.update(zip(enum_vars, values))
        for u, m in program_maps.items():
            alpha[u] = m.evaluate(alpha)
        if not any(all(alpha[abs(l)] != (l > 0) for l in cl) for cl in clauses):
            return False
    return True


def test_kernel_matches_naive_enumeration():
    import random

    rng = random.Random(4242)
    f = PCNF(
        [QuantBlock(EXISTS, (1, 2, 3)), QuantBlock(FORALL, (4,)), QuantBlock(EXISTS, (5,))],
        [],
    )
    for _ in range(300):
        nclauses = rng.randint(1, 5)
        clauses = []
        for _ in range(nclauses):
            size = rng.randint(1, 4)
            lits = set()
            for _ in range(size):
                v = rng.randint(1, 5)
                lits.add(v if rng.random() < 0.5 else -v)
            clauses.append(frozenset(lits))
        fixed = {}
        enum_vars = [1, 2, 3, 5]
        if rng.random() < 0.5:
            fixed[enum_vars.pop(rng.randrange(len(enum_vars)))] = rng.random() < 0.5
        table = NodeTable()
        programs = {4: build_parity_map(table, 4, [1, 2], rng.random() < 0.5)}
        want = naive_every_assignment_falsifies(clauses, fixed, enum_vars, programs)
        got = every_assignment_falsifies(clauses, fixed, enum_vars, programs)
        assert got == want
