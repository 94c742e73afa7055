"""Shared fixtures and independent test oracles."""

from __future__ import annotations

import re

import pytest

from mres.calculus import Axiom, Proof, Resolve
from mres.formula import EXISTS, FORALL, PCNF, QuantBlock
from mres.mergemap import MergeMap, NodeTable


def make_example1() -> PCNF:
    """The three-variable warm-up instance: exists x, forall u, exists t
    with all four clauses linking u to x and t."""
    x, u, t = 1, 2, 3
    prefix = [
        QuantBlock(EXISTS, (x,)),
        QuantBlock(FORALL, (u,)),
        QuantBlock(EXISTS, (t,)),
    ]
    matrix = [
        [x, u, t],
        [-x, -u, t],
        [x, u, -t],
        [-x, -u, -t],
    ]
    return PCNF(prefix, matrix, {x: "x", u: "u", t: "t"})


def make_example1_proof(f: PCNF) -> Proof:
    """The 7-line refutation: clash the t-clauses pairwise on x, then on t."""
    x, t = 1, 3
    steps = [
        Axiom(0),
        Axiom(1),
        Resolve(1, 2, x),
        Axiom(2),
        Axiom(3),
        Resolve(4, 5, x),
        Resolve(3, 6, t),
    ]
    return Proof(f, steps)


@pytest.fixture
def example1() -> PCNF:
    return make_example1()


@pytest.fixture
def example1_proof(example1) -> Proof:
    return make_example1_proof(example1)


# -- independent circuit simulator (oracle for the export format) -----------

_GATE_CONST = re.compile(r"^gate (\S+) = const ([01])$")
_GATE_MUX = re.compile(r"^gate (\S+) = mux\(x(\d+), (\S+), (\S+)\)$")
_OUTPUT = re.compile(r"^output u(\d+) = (\S+)$")


def simulate_circuit(text: str, inputs: dict[int, bool]) -> dict[int, bool]:
    """Forward-evaluate an exported strategy circuit.

    Returns the value of every `output u<idx>` line. Gates must appear
    children first (the exporter guarantees it).
    """
    values: dict[str, bool] = {}
    outputs: dict[int, bool] = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        m = _GATE_CONST.match(line)
        if m:
            values[m.group(1)] = m.group(2) == "1"
            continue
        m = _GATE_MUX.match(line)
        if m:
            name, var, lo, hi = m.groups()
            values[name] = values[hi] if inputs[int(var)] else values[lo]
            continue
        m = _OUTPUT.match(line)
        if m:
            outputs[int(m.group(1))] = values[m.group(2)]
            continue
        raise AssertionError(f"unparsable circuit line: {line!r}")
    return outputs


# -- structural copy of a merge-map into another table ----------------------


def copy_map(m: MergeMap, table: NodeTable) -> MergeMap:
    """Rebuild a program map node-for-node in a different table."""
    assert not m.is_trivial
    memo: dict[int, int] = {}

    def go(nid: int) -> int:
        if nid not in memo:
            node = m.table.node(nid)
            if node[0] == "leaf":
                memo[nid] = table.leaf(node[1])
            else:
                memo[nid] = table.query(node[1], go(node[2]), go(node[3]))
        return memo[nid]

    return MergeMap(m.owner, table, go(m.root))
