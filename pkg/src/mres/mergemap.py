"""Merge-maps: universal-player strategies as shared branching programs.

A merge-map for a universal variable u is either trivial (u unconstrained)
or a rooted deterministic branching program whose internal nodes query
existential variables quantified before u. Nodes live in a NodeTable, a
unique table keyed by structure: two structurally identical programs built
in any order get the same root id. Isomorphism of programs within one table
is therefore just root equality.

There is deliberately no BDD-style reduction here: a query node with equal
children is a real node. The calculus distinguishes programs by structure,
not by the function they compute.
"""

from __future__ import annotations

from typing import Iterator, Mapping, Optional, Sequence

from .formula import PCNF


class MapError(ValueError):
    """Bad merge-map operation (trivial map evaluated, owner mismatch, ...)."""


# Node encodings inside a NodeTable:
#   ("leaf", value)            value: bool
#   ("q", var, lo_id, hi_id)   lo = branch for var=0, hi = branch for var=1
Node = tuple


class NodeTable:
    """Unique table of branching-program nodes.

    Single-threaded construction; reads of a finished table are safe to
    share. Node ids are assigned in creation order, so children always have
    smaller ids than their parents.
    """

    __slots__ = ("_nodes", "_ids")

    def __init__(self) -> None:
        self._nodes: list[Node] = []
        self._ids: dict[Node, int] = {}

    def _intern(self, node: Node) -> int:
        nid = self._ids.get(node)
        if nid is None:
            nid = len(self._nodes)
            self._nodes.append(node)
            self._ids[node] = nid
        return nid

    def leaf(self, value: bool) -> int:
        return self._intern(("leaf", bool(value)))

    def query(self, var: int, if_false: int, if_true: int) -> int:
        n = len(self._nodes)
        if not (0 <= if_false < n and 0 <= if_true < n):
            raise MapError("query children must already exist in the table")
        return self._intern(("q", var, if_false, if_true))

    def node(self, nid: int) -> Node:
        return self._nodes[nid]

    def __len__(self) -> int:
        return len(self._nodes)

    def reachable(self, root: int) -> list[int]:
        """Ids of all nodes reachable from root, ascending."""
        seen: set[int] = set()
        stack = [root]
        while stack:
            nid = stack.pop()
            if nid in seen:
                continue
            seen.add(nid)
            node = self._nodes[nid]
            if node[0] == "q":
                stack.append(node[2])
                stack.append(node[3])
        return sorted(seen)


class MergeMap:
    """A strategy for one universal variable: trivial, or a program root."""

    __slots__ = ("owner", "table", "root")

    def __init__(self, owner: int, table: Optional[NodeTable], root: Optional[int]):
        if (table is None) != (root is None):
            raise MapError("program maps need both a table and a root")
        self.owner = owner
        self.table = table
        self.root = root

    @property
    def is_trivial(self) -> bool:
        return self.root is None

    def constant_value(self) -> Optional[bool]:
        """The constant computed, or None if trivial or non-constant."""
        if self.is_trivial:
            return None
        node = self.table.node(self.root)
        return node[1] if node[0] == "leaf" else None

    def evaluate(self, assignment: Mapping[int, bool]) -> bool:
        """Follow the program on an assignment covering every queried var."""
        if self.is_trivial:
            raise MapError(f"trivial merge-map for {self.owner} has no value")
        nid = self.root
        while True:
            node = self.table.node(nid)
            if node[0] == "leaf":
                return node[1]
            _, var, lo, hi = node
            try:
                nid = hi if assignment[var] else lo
            except KeyError:
                raise MapError(f"assignment missing queried variable {var}") from None

    def node_count(self) -> int:
        if self.is_trivial:
            return 0
        return len(self.table.reachable(self.root))

    def queried_variables(self) -> set[int]:
        if self.is_trivial:
            return set()
        return {
            self.table.node(nid)[1]
            for nid in self.table.reachable(self.root)
            if self.table.node(nid)[0] == "q"
        }

    def __repr__(self) -> str:
        if self.is_trivial:
            return f"MergeMap({self.owner}: *)"
        c = self.constant_value()
        if c is not None:
            return f"MergeMap({self.owner}: const {int(c)})"
        return f"MergeMap({self.owner}: program @{self.root}, {self.node_count()} nodes)"


def trivial_map(owner: int) -> MergeMap:
    return MergeMap(owner, None, None)


def constant_map(table: NodeTable, owner: int, value: bool) -> MergeMap:
    return MergeMap(owner, table, table.leaf(value))


def is_isomorphic(m1: MergeMap, m2: MergeMap) -> bool:
    """Structural identity of the rooted program DAGs.

    Defined as False whenever either map is trivial (triviality is tested
    separately by the rules). Within one table this is root equality thanks
    to hash-consing; across tables a memoized structural walk is used.
    """
    if m1.owner != m2.owner:
        raise MapError(f"owner mismatch: {m1.owner} vs {m2.owner}")
    if m1.is_trivial or m2.is_trivial:
        return False
    if m1.table is m2.table:
        return m1.root == m2.root
    memo: dict[tuple[int, int], bool] = {}

    def walk(a: int, b: int) -> bool:
        key = (a, b)
        got = memo.get(key)
        if got is not None:
            return got
        na, nb = m1.table.node(a), m2.table.node(b)
        if na[0] != nb[0]:
            result = False
        elif na[0] == "leaf":
            result = na[1] == nb[1]
        else:
            result = na[1] == nb[1] and walk(na[2], nb[2]) and walk(na[3], nb[3])
        memo[key] = result
        return result

    return walk(m1.root, m2.root)


def merge(f: PCNF, pivot: int, m1: MergeMap, m2: MergeMap) -> MergeMap:
    """Branch on the pivot into two programs: pivot=0 goes to m1, else m2.

    Shared substructure is represented once (the node table is common), so
    the result has at most |m1| + |m2| + 1 nodes.
    """
    if m1.owner != m2.owner:
        raise MapError(f"owner mismatch: {m1.owner} vs {m2.owner}")
    if m1.is_trivial or m2.is_trivial:
        raise MapError("merge needs two program maps")
    if m1.table is not m2.table:
        raise MapError("merge needs maps from the same node table")
    if not f.is_existential(pivot):
        raise MapError(f"merge pivot {pivot} must be existential")
    if not f.precedes(pivot, m1.owner):
        raise MapError(
            f"pivot {pivot} is not quantified before map owner {m1.owner}"
        )
    return MergeMap(m1.owner, m1.table, m1.table.query(pivot, m1.root, m2.root))


def build_parity_map(
    table: NodeTable, owner: int, xs: Sequence[int], parity: bool
) -> MergeMap:
    """Smallest ordered program over xs computing their XOR (or its negation).

    parity=True gives XOR(xs), parity=False its complement. For m = len(xs)
    variables the program has 2m-1 internal nodes and two leaves; for m = 0
    it is the single leaf XOR() = 0 (negated: 1).
    """
    leaf0 = table.leaf(False)
    leaf1 = table.leaf(True)
    memo: dict[tuple[int, bool], int] = {}

    def node(j: int, want: bool) -> int:
        key = (j, want)
        if key not in memo:
            if j == len(xs):
                memo[key] = leaf0 if want else leaf1
            else:
                memo[key] = table.query(
                    xs[j], node(j + 1, want), node(j + 1, not want)
                )
        return memo[key]

    return MergeMap(owner, table, node(0, bool(parity)))


def format_merge_map(m: MergeMap) -> str:
    """Textual dump: `map <u> root <id>` plus one `node ...` line per node."""
    if m.is_trivial:
        return f"map {m.owner} trivial\n"
    lines = [f"map {m.owner} root {m.root}"]
    for nid in m.table.reachable(m.root):
        node = m.table.node(nid)
        if node[0] == "leaf":
            lines.append(f"node {nid} leaf {int(node[1])}")
        else:
            lines.append(f"node {nid} q {node[1]} {node[2]} {node[3]}")
    return "\n".join(lines) + "\n"


def iter_program_nodes(m: MergeMap) -> Iterator[tuple[int, Node]]:
    """(id, node) pairs reachable from the root, children before parents."""
    if m.is_trivial:
        return
    for nid in m.table.reachable(m.root):
        yield nid, m.table.node(nid)
