"""Deterministic generators for the benchmark QBF families.

Every generator uses a fixed canonical variable numbering (prefix order,
left to right) and emits clauses in definition order, so identical
parameters always produce byte-identical QDIMACS output. The numbering per
family is spelled out in each builder's docstring; variable names are
recorded on the formula for readable comments.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .formula import EXISTS, FORALL, PCNF, FormulaError, QuantBlock


class Family(enum.Enum):
    KBKF_LQ = "kbkf-lq"
    KBKF_LQ_WEAK = "kbkf-lq-weak"
    KBKF_LQ_SPLIT = "kbkf-lq-split"
    QPARITY = "qparity"
    LQPARITY = "lqparity"
    QUPARITY = "quparity"
    MPARITY = "mparity"
    EQ2 = "eq2"
    HEQ2 = "heq2"


def family_from_name(name: str) -> Family:
    for fam in Family:
        if fam.value == name:
            return fam
    raise ValueError(f"unknown family {name!r}")


# -- covering partitions (for the holed equality grid) ---------------------


@dataclass(frozen=True)
class CoveringPartition:
    """Two-coloring of the n x n grid; region 0 holds the listed cells.

    Covering property: each region touches every row and every column.
    """

    n: int
    region0: frozenset[tuple[int, int]]

    def region(self, i: int, j: int) -> int:
        return 0 if (i, j) in self.region0 else 1

    def validate(self) -> None:
        cells = {(i, j) for i in range(1, self.n + 1) for j in range(1, self.n + 1)}
        if not self.region0 <= cells:
            raise FormulaError("region cells outside the grid")
        region1 = cells - self.region0
        for i in range(1, self.n + 1):
            if not any((i, j) in self.region0 for j in range(1, self.n + 1)):
                raise FormulaError(f"region 0 misses row {i}")
            if not any((i, j) in region1 for j in range(1, self.n + 1)):
                raise FormulaError(f"region 1 misses row {i}")
        for j in range(1, self.n + 1):
            if not any((i, j) in self.region0 for i in range(1, self.n + 1)):
                raise FormulaError(f"region 0 misses column {j}")
            if not any((i, j) in region1 for i in range(1, self.n + 1)):
                raise FormulaError(f"region 1 misses column {j}")


def default_partition(n: int) -> CoveringPartition:
    """Block-diagonal split: region 0 is the two diagonal h x h / (n-h)^2
    blocks with h = floor(n/2). No covering partition exists for n < 2."""
    if n < 2:
        raise FormulaError("covering partitions need n >= 2")
    h = n // 2
    cells = set()
    for i in range(1, h + 1):
        for j in range(1, h + 1):
            cells.add((i, j))
    for i in range(h + 1, n + 1):
        for j in range(h + 1, n + 1):
            cells.add((i, j))
    partition = CoveringPartition(n, frozenset(cells))
    partition.validate()
    return partition


# -- shared helpers ---------------------------------------------------------


def parity_clauses(ys: list[int]) -> list[frozenset[int]]:
    """CNF stating XOR(ys) = 0: one clause per odd-size negation pattern.

    Patterns are enumerated by ascending bitmask, so the order is fixed.
    """
    k = len(ys)
    out = []
    for mask in range(1 << k):
        if bin(mask).count("1") % 2 == 1:
            out.append(
                frozenset(
                    -ys[i] if (mask >> i) & 1 else ys[i] for i in range(k)
                )
            )
    return out


# -- the KBKF chain family and its variants ---------------------------------


def _kbkf_vars(n: int, with_t: bool):
    names = {}
    idx = 0
    t = None
    if with_t:
        idx += 1
        t = idx
        names[t] = "t"
    d, e, x, fvar = {}, {}, {}, {}
    for i in range(1, n + 1):
        idx += 1
        d[i] = idx
        names[idx] = f"d{i}"
        idx += 1
        e[i] = idx
        names[idx] = f"e{i}"
        idx += 1
        x[i] = idx
        names[idx] = f"x{i}"
    for i in range(1, n + 1):
        idx += 1
        fvar[i] = idx
        names[idx] = f"f{i}"
    return t, d, e, x, fvar, names


def _kbkf_a_clauses(n, d, e, x, fvar):
    all_neg_f = [-fvar[j] for j in range(1, n + 1)]
    clauses = [frozenset([-d[1], -e[1]] + all_neg_f)]
    for i in range(1, n):
        tail = [-d[i + 1], -e[i + 1]] + all_neg_f
        clauses.append(frozenset([d[i], x[i]] + tail))
        clauses.append(frozenset([e[i], -x[i]] + tail))
    clauses.append(frozenset([d[n], x[n]] + all_neg_f))
    clauses.append(frozenset([e[n], -x[n]] + all_neg_f))
    return clauses


def _kbkf_b_parts(n, x, fvar):
    """(positive-x part, shared f tail) of the chain-closing clauses."""
    out = []
    for i in range(1, n + 1):
        tail = [fvar[i]] + [-fvar[j] for j in range(i + 1, n + 1)]
        out.append((x[i], tail))
    return out


def _kbkf_prefix(n, t, d, e, x, fvar):
    blocks = []
    first = [d[1], e[1]]
    if t is not None:
        first = [t] + first
    blocks.append(QuantBlock(EXISTS, tuple(first)))
    blocks.append(QuantBlock(FORALL, (x[1],)))
    for i in range(2, n + 1):
        blocks.append(QuantBlock(EXISTS, (d[i], e[i])))
        blocks.append(QuantBlock(FORALL, (x[i],)))
    blocks.append(QuantBlock(EXISTS, tuple(fvar[i] for i in range(1, n + 1))))
    return blocks


def gen_kbkf_lq(n: int) -> PCNF:
    """Chain family: prefix E d_i,e_i / A x_i alternating, then E f_1..f_n.

    Numbering: d_i,e_i,x_i = 3i-2,3i-1,3i and f_i = 3n+i.
    """
    t, d, e, x, fvar, names = _kbkf_vars(n, with_t=False)
    clauses = _kbkf_a_clauses(n, d, e, x, fvar)
    for xi, tail in _kbkf_b_parts(n, x, fvar):
        clauses.append(frozenset([xi] + tail))
        clauses.append(frozenset([-xi] + tail))
    return PCNF(_kbkf_prefix(n, t, d, e, x, fvar), clauses, names)


def gen_kbkf_lq_weak(n: int) -> PCNF:
    """Chain family with d_i added to the closing clauses (same numbering)."""
    t, d, e, x, fvar, names = _kbkf_vars(n, with_t=False)
    clauses = _kbkf_a_clauses(n, d, e, x, fvar)
    for i, (xi, tail) in enumerate(_kbkf_b_parts(n, x, fvar), start=1):
        clauses.append(frozenset([d[i], xi] + tail))
        clauses.append(frozenset([-d[i], -xi] + tail))
    return PCNF(_kbkf_prefix(n, t, d, e, x, fvar), clauses, names)


def gen_kbkf_lq_split(n: int) -> PCNF:
    """Chain family with a fresh first-block existential t splitting the
    closing clauses: t or B^k_i, plus selector clauses (-t, d_i) / (-t, -d_i).

    Numbering: t = 1, then d_i,e_i,x_i = 3i-1,3i,3i+1 and f_i = 3n+1+i.
    """
    t, d, e, x, fvar, names = _kbkf_vars(n, with_t=True)
    clauses = _kbkf_a_clauses(n, d, e, x, fvar)
    for i, (xi, tail) in enumerate(_kbkf_b_parts(n, x, fvar), start=1):
        clauses.append(frozenset([t, xi] + tail))
        clauses.append(frozenset([t, -xi] + tail))
        clauses.append(frozenset([-t, d[i]]))
        clauses.append(frozenset([-t, -d[i]]))
    return PCNF(_kbkf_prefix(n, t, d, e, x, fvar), clauses, names)


# -- parity families ---------------------------------------------------------


def _parity_chain_clauses(n, x, tvar):
    """Per-stage parity constraints t_i = t_{i-1} xor x_i (t_0 absent)."""
    stages = []
    for i in range(1, n + 1):
        ys = [x[1], tvar[1]] if i == 1 else [tvar[i - 1], x[i], tvar[i]]
        stages.append(parity_clauses(ys))
    return stages


def gen_qparity(n: int) -> PCNF:
    """Parity chain with one universal: x_i = i, z = n+1, t_i = n+1+i."""
    x = {i: i for i in range(1, n + 1)}
    z = n + 1
    tvar = {i: n + 1 + i for i in range(1, n + 1)}
    names = {**{x[i]: f"x{i}" for i in x}, z: "z", **{tvar[i]: f"t{i}" for i in tvar}}
    clauses = [cl for stage in _parity_chain_clauses(n, x, tvar) for cl in stage]
    clauses.append(frozenset([tvar[n], z]))
    clauses.append(frozenset([-tvar[n], -z]))
    prefix = [
        QuantBlock(EXISTS, tuple(x[i] for i in range(1, n + 1))),
        QuantBlock(FORALL, (z,)),
        QuantBlock(EXISTS, tuple(tvar[i] for i in range(1, n + 1))),
    ]
    return PCNF(prefix, clauses, names)


def gen_lqparity(n: int) -> PCNF:
    """Parity chain with every z-free clause doubled into C|z and C|-z."""
    x = {i: i for i in range(1, n + 1)}
    z = n + 1
    tvar = {i: n + 1 + i for i in range(1, n + 1)}
    names = {**{x[i]: f"x{i}" for i in x}, z: "z", **{tvar[i]: f"t{i}" for i in tvar}}
    clauses = []
    for stage in _parity_chain_clauses(n, x, tvar):
        for cl in stage:
            clauses.append(cl | {z})
            clauses.append(cl | {-z})
    clauses.append(frozenset([tvar[n], z]))
    clauses.append(frozenset([-tvar[n], -z]))
    prefix = [
        QuantBlock(EXISTS, tuple(x[i] for i in range(1, n + 1))),
        QuantBlock(FORALL, (z,)),
        QuantBlock(EXISTS, tuple(tvar[i] for i in range(1, n + 1))),
    ]
    return PCNF(prefix, clauses, names)


def gen_quparity(n: int) -> PCNF:
    """The doubled parity chain with the universal duplicated: literals z
    become z1,z2 and -z becomes -z1,-z2. Numbering: x_i = i, z1/z2 = n+1/n+2,
    t_i = n+2+i."""
    x = {i: i for i in range(1, n + 1)}
    z1, z2 = n + 1, n + 2
    tvar = {i: n + 2 + i for i in range(1, n + 1)}
    names = {
        **{x[i]: f"x{i}" for i in x},
        z1: "z1",
        z2: "z2",
        **{tvar[i]: f"t{i}" for i in tvar},
    }
    clauses = []
    for stage in _parity_chain_clauses(n, x, tvar):
        for cl in stage:
            clauses.append(cl | {z1, z2})
            clauses.append(cl | {-z1, -z2})
    clauses.append(frozenset([tvar[n], z1, z2]))
    clauses.append(frozenset([-tvar[n], -z1, -z2]))
    prefix = [
        QuantBlock(EXISTS, tuple(x[i] for i in range(1, n + 1))),
        QuantBlock(FORALL, (z1, z2)),
        QuantBlock(EXISTS, tuple(tvar[i] for i in range(1, n + 1))),
    ]
    return PCNF(prefix, clauses, names)


def gen_mparity(n: int) -> PCNF:
    """Duplicated-universal parity chain with auxiliary a_{i,j} variables and
    ladder clauses that let the refutation assemble parity merge-maps.

    Numbering: a_{i,j} = (i-1)n+j, x_i = n^2+i, z1/z2 = n^2+n+1 / n^2+n+2,
    t_i = n^2+n+2+i. The full a-grid is quantified even though only a_{i,j}
    with i < j occur in clauses (the prefix is generated as declared).
    """
    a = {(i, j): (i - 1) * n + j for i in range(1, n + 1) for j in range(1, n + 1)}
    x = {i: n * n + i for i in range(1, n + 1)}
    z1, z2 = n * n + n + 1, n * n + n + 2
    tvar = {i: n * n + n + 2 + i for i in range(1, n + 1)}
    names = {
        **{a[i, j]: f"a{i}_{j}" for (i, j) in a},
        **{x[i]: f"x{i}" for i in x},
        z1: "z1",
        z2: "z2",
        **{tvar[i]: f"t{i}" for i in tvar},
    }

    clauses = []
    stages = _parity_chain_clauses(n, x, tvar)
    for i in range(1, n + 1):
        extra = [a[i, n]] if i < n else []
        for cl in stages[i - 1]:
            clauses.append(cl | {z1, z2} | frozenset(extra))
            clauses.append(cl | {-z1, -z2} | frozenset(extra))
    clauses.append(frozenset([tvar[n], z1, z2]))
    clauses.append(frozenset([-tvar[n], -z1, -z2]))
    for i in range(1, n):
        for j in range(n, i + 1, -1):
            clauses.append(frozenset([-a[i, j], x[j], a[i, j - 1]]))
            clauses.append(frozenset([-a[i, j], -x[j], a[i, j - 1]]))
        clauses.append(frozenset([-a[i, i + 1], x[i + 1]]))
        clauses.append(frozenset([-a[i, i + 1], -x[i + 1]]))

    prefix = [
        QuantBlock(
            EXISTS,
            tuple(a[i, j] for i in range(1, n + 1) for j in range(1, n + 1))
            + tuple(x[i] for i in range(1, n + 1)),
        ),
        QuantBlock(FORALL, (z1, z2)),
        QuantBlock(EXISTS, tuple(tvar[i] for i in range(1, n + 1))),
    ]
    return PCNF(prefix, clauses, names)


# -- equality grid families --------------------------------------------------


def _eq2_vars(n: int):
    x = {i: i for i in range(1, n + 1)}
    y = {i: n + i for i in range(1, n + 1)}
    u = {j: 2 * n + j for j in range(1, n + 1)}
    v = {j: 3 * n + j for j in range(1, n + 1)}
    t = {(i, j): 4 * n + (i - 1) * n + j for i in range(1, n + 1) for j in range(1, n + 1)}
    names = {
        **{x[i]: f"x{i}" for i in x},
        **{y[i]: f"y{i}" for i in y},
        **{u[j]: f"u{j}" for j in u},
        **{v[j]: f"v{j}" for j in v},
        **{t[i, j]: f"t{i}_{j}" for (i, j) in t},
    }
    prefix = [
        QuantBlock(
            EXISTS,
            tuple(x[i] for i in range(1, n + 1)) + tuple(y[i] for i in range(1, n + 1)),
        ),
        QuantBlock(
            FORALL,
            tuple(u[j] for j in range(1, n + 1)) + tuple(v[j] for j in range(1, n + 1)),
        ),
        QuantBlock(
            EXISTS,
            tuple(t[i, j] for i in range(1, n + 1) for j in range(1, n + 1)),
        ),
    ]
    return x, y, u, v, t, names, prefix


def gen_eq2(n: int) -> PCNF:
    """Squared equality grid: per cell (i,j) four clauses linking x_i,y_j to
    u_i,v_j, plus one long clause of all negated cell outputs.

    Numbering: x_i = i, y_i = n+i, u_j = 2n+j, v_j = 3n+j,
    t_{i,j} = 4n + (i-1)n + j.
    """
    x, y, u, v, t, names, prefix = _eq2_vars(n)
    clauses = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            tij = t[i, j]
            clauses.append(frozenset([x[i], y[j], u[i], v[j], tij]))
            clauses.append(frozenset([x[i], -y[j], u[i], -v[j], tij]))
            clauses.append(frozenset([-x[i], y[j], -u[i], v[j], tij]))
            clauses.append(frozenset([-x[i], -y[j], -u[i], -v[j], tij]))
    clauses.append(frozenset(-t[i, j] for i in range(1, n + 1) for j in range(1, n + 1)))
    return PCNF(prefix, clauses, names)


def gen_heq2(n: int, partition: Optional[CoveringPartition] = None) -> PCNF:
    """Equality grid with holes: per cell, universal literals are dropped
    according to the cell's region in a covering partition (region 0 keeps
    positive literals where the equality pattern has them, region 1 keeps
    the negative ones). Same numbering as the full grid."""
    if n < 2:
        raise FormulaError("heq2 needs n >= 2 (no covering partition exists for n=1)")
    if partition is None:
        partition = default_partition(n)
    if partition.n != n:
        raise FormulaError(f"partition is for n={partition.n}, formula has n={n}")
    partition.validate()

    x, y, u, v, t, names, prefix = _eq2_vars(n)
    clauses = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            tij = t[i, j]
            if partition.region(i, j) == 0:
                clauses.append(frozenset([x[i], y[j], u[i], v[j], tij]))
                clauses.append(frozenset([x[i], -y[j], u[i], tij]))
                clauses.append(frozenset([-x[i], y[j], v[j], tij]))
                clauses.append(frozenset([-x[i], -y[j], tij]))
            else:
                clauses.append(frozenset([x[i], y[j], tij]))
                clauses.append(frozenset([x[i], -y[j], -v[j], tij]))
                clauses.append(frozenset([-x[i], y[j], -u[i], tij]))
                clauses.append(frozenset([-x[i], -y[j], -u[i], -v[j], tij]))
    clauses.append(frozenset(-t[i, j] for i in range(1, n + 1) for j in range(1, n + 1)))
    return PCNF(prefix, clauses, names)


# -- dispatch ----------------------------------------------------------------


def gen(
    family: Family, n: int, partition: Optional[CoveringPartition] = None
) -> PCNF:
    """Generate a family instance with canonical numbering.

    `partition` applies to HEQ2 only (default: block-diagonal covering
    partition).
    """
    if n < 1:
        raise FormulaError("family size must be at least 1")
    if partition is not None and family is not Family.HEQ2:
        raise FormulaError(f"{family.value} does not take a partition")
    builders = {
        Family.KBKF_LQ: gen_kbkf_lq,
        Family.KBKF_LQ_WEAK: gen_kbkf_lq_weak,
        Family.KBKF_LQ_SPLIT: gen_kbkf_lq_split,
        Family.QPARITY: gen_qparity,
        Family.LQPARITY: gen_lqparity,
        Family.QUPARITY: gen_quparity,
        Family.MPARITY: gen_mparity,
        Family.EQ2: gen_eq2,
    }
    if family is Family.HEQ2:
        return gen_heq2(n, partition)
    return builders[family](n)


def qdimacs_comments(family: Family, n: int, f: PCNF) -> list[str]:
    """Comment header recording family, size, and the variable-name map."""
    out = [f"family {family.value} n={n}"]
    out.extend(f"var {v} {f.name(v)}" for v in f.variables)
    return out
