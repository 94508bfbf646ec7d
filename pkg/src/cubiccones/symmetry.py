"""Quotients of the boundary calculus of M_{0,n} by groups permuting the markings.

Conventions for a quotient divisor ``P`` (the image of an orbit ``O`` of boundary
divisors) follow the stacky bookkeeping: if ``s`` is the generic automorphism
order of ``P`` then ``q^* P = s * sum_{T in O} D_T``.  With this normalisation

* pushing ``D_T`` forward gives ``|Stab(D_T)| / s`` copies of ``P``, and
* ``P . q_*(F) = s * sum_{T in O} D_T . F`` for an F-curve ``F`` upstairs.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import permutations, product
from math import factorial, prod
from typing import Iterable, Mapping, Optional, Sequence

from .exactq import QMatrix, primitive, rank
from .stablegraphs import (
    BoundaryDivisor,
    DivRelation,
    FPartition,
    StableTree,
    all_keel_relations,
    enumerate_boundary_divisors,
    enumerate_dim1_strata,
    fpartition_of,
    pair_divisor_curve,
)

Perm = tuple  # perm[i] is the image of marking i; perm[0] is unused


def perm_from_cycles(n: int, cycles: Iterable[Sequence[int]]) -> Perm:
    p = list(range(n + 1))
    for cyc in cycles:
        cyc = list(cyc)
        if len(set(cyc)) != len(cyc) or not all(1 <= x <= n for x in cyc):
            raise ValueError(f"bad cycle {cyc}")
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            p[a] = b
    return tuple(p)


def compose(p: Perm, r: Perm) -> Perm:
    """``p`` after ``r``."""
    return tuple(p[r[i]] for i in range(len(p)))


class UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            self.parent[b] = a

    def classes(self) -> list[list]:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


@dataclass(frozen=True)
class GroupSpec:
    """A permutation group on ``{1..n}``: a Young subgroup or the closure of generators."""

    n: int
    young: Optional[tuple] = None
    gens: Optional[tuple] = None
    name: str = ""

    def __post_init__(self):
        if (self.young is None) == (self.gens is None):
            raise ValueError("give exactly one of young blocks or generators")
        if self.young is not None:
            blocks = tuple(tuple(sorted(b)) for b in self.young)
            flat = [x for b in blocks for x in b]
            if len(set(flat)) != len(flat) or not all(1 <= x <= self.n for x in flat):
                raise ValueError("Young blocks must be disjoint subsets of 1..n")
            object.__setattr__(self, "young", blocks)
        else:
            gens = tuple(tuple(g) for g in self.gens)
            for g in gens:
                if len(g) != self.n + 1 or sorted(g[1:]) != list(range(1, self.n + 1)):
                    raise ValueError(f"{g} is not a permutation of 1..{self.n}")
            object.__setattr__(self, "gens", gens)

    @classmethod
    def trivial(cls, n: int) -> "GroupSpec":
        return cls(n, young=(), name="trivial")

    @classmethod
    def from_json(cls, data: Mapping) -> "GroupSpec":
        n = int(data["n"])
        if "young" in data:
            return cls(n, young=tuple(tuple(b) for b in data["young"]), name=data.get("name", ""))
        if "gens" in data:
            gens = tuple(perm_from_cycles(n, g) for g in data["gens"])
            return cls(n, gens=gens, name=data.get("name", ""))
        raise ValueError("group spec needs 'young' or 'gens'")

    def to_json(self) -> dict:
        if self.young is not None:
            return {"n": self.n, "young": [list(b) for b in self.young]}
        return {"n": self.n, "gens": [_cycles(g) for g in self.gens]}

    @property
    def label(self) -> str:
        return self.name or json.dumps(self.to_json(), separators=(",", ":"))

    def generators(self) -> list[Perm]:
        if self.gens is not None:
            return list(self.gens)
        out = []
        for b in self.young:
            for a, c in zip(b, b[1:]):
                out.append(perm_from_cycles(self.n, [(a, c)]))
        return out

    @cached_property
    def elements(self) -> tuple:
        ident = tuple(range(self.n + 1))
        if self.young is not None:
            factors = []
            for b in self.young:
                factors.append([dict(zip(b, img)) for img in permutations(b)])
            out = []
            for choice in product(*factors):
                p = list(ident)
                for m in choice:
                    for a, c in m.items():
                        p[a] = c
                out.append(tuple(p))
            return tuple(sorted(out))
        seen = {ident}
        frontier = [ident]
        gens = self.generators()
        while frontier:
            nxt = []
            for p in frontier:
                for g in gens:
                    r = compose(g, p)
                    if r not in seen:
                        seen.add(r)
                        nxt.append(r)
            frontier = nxt
        return tuple(sorted(seen))

    @property
    def order(self) -> int:
        if self.young is not None:
            return prod(factorial(len(b)) for b in self.young)
        return len(self.elements)

    def contains_transposition(self, a: int, b: int) -> bool:
        if self.young is not None:
            return any(a in blk and b in blk for blk in self.young)
        return perm_from_cycles(self.n, [(a, b)]) in set(self.elements)


def _cycles(p: Perm) -> list[list[int]]:
    seen, out = set(), []
    for i in range(1, len(p)):
        if i in seen or p[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = p[j]
        out.append(cyc)
    return out


S5 = GroupSpec(7, young=((3, 4, 5, 6, 7),), name="S5")
S2xS5 = GroupSpec(7, young=((1, 2), (3, 4, 5, 6, 7)), name="S2xS5")
NAMED_GROUPS = {"S5": S5, "S2xS5": S2xS5}


def named_group(name: str, n: int = 7) -> GroupSpec:
    if name in ("trivial", "1"):
        return GroupSpec.trivial(n)
    try:
        return NAMED_GROUPS[name]
    except KeyError:
        raise ValueError(f"unknown group {name!r}; known: trivial, {', '.join(NAMED_GROUPS)}") from None


# ---------------------------------------------------------------------------
# divisors


def generic_automorphism_order(d: BoundaryDivisor, g: GroupSpec) -> int:
    for s in d.sides():
        if len(s) == 2:
            a, b = sorted(s)
            if g.contains_transposition(a, b):
                return 2
    return 1


@dataclass(frozen=True)
class QuotientDivisor:
    orbit: tuple
    stacky_order: int
    name: str = ""
    key: tuple = field(default=(), compare=False)

    def sort_key(self):
        return self.key

    @property
    def representative(self) -> BoundaryDivisor:
        return self.orbit[0]

    def __repr__(self):
        return self.name


def _divisor_name(d: BoundaryDivisor, g: GroupSpec) -> tuple[str, tuple]:
    """Display name and sort key for the orbit of ``d``."""
    side = d.side
    if g.name == "S5":
        fam = "D12" if 2 in side else "D1"
        return f"{fam}_{len(side)}", (0 if fam == "D12" else 1, len(side))
    if g.name == "S2xS5":
        if 2 in side:
            return f"Doo_{len(side)}", (0, len(side))
        i = min(len(side), d.n - len(side))
        return f"Do_{i}", (1, i)
    if g.order == 1:
        return d.label, (0,) + d.sort_key()
    return "", ()


def orbit_divisors(n: int, g: GroupSpec) -> list[QuotientDivisor]:
    """Orbits of boundary divisors, each with its generic stacky automorphism order."""
    if g.n != n:
        raise ValueError("group acts on a different number of markings")
    divs = enumerate_boundary_divisors(n)
    uf = UnionFind(divs)
    for p in g.generators():
        for d in divs:
            uf.union(d, d.permuted(p))
    out = []
    for cls in uf.classes():
        orbit = tuple(sorted(cls))
        rep = orbit[0]
        name, key = _divisor_name(rep, g)
        if not key:
            key = (0,) + rep.sort_key()
        out.append(QuotientDivisor(orbit, generic_automorphism_order(rep, g), name, key))
    out.sort(key=QuotientDivisor.sort_key)
    if not all(qd.name for qd in out):
        out = [QuotientDivisor(qd.orbit, qd.stacky_order, f"B{i + 1}", qd.key) for i, qd in enumerate(out)]
    return out


def _orbit_index(qds: Sequence[QuotientDivisor]) -> dict:
    return {d: qd for qd in qds for d in qd.orbit}


def pushforward_relation(rel: DivRelation, g: GroupSpec, qds: Optional[Sequence[QuotientDivisor]] = None) -> DivRelation:
    """Push a relation among boundary divisors to the quotient by ``g``.

    ``D_T`` contributes ``|Stab_g(D_T)| / stacky_order`` to its orbit; the result is
    rescaled to primitive integers with the original sides kept apart.
    """
    if qds is None:
        qds = orbit_divisors(g.n, g)
    index = _orbit_index(qds)
    coeff: dict = {}
    for d, c in rel.difference().items():
        qd = index[d]
        stab = Fraction(g.order, len(qd.orbit))
        coeff[qd] = coeff.get(qd, Fraction(0)) + c * stab / qd.stacky_order
    basis = [qd for qd in qds if coeff.get(qd, 0) != 0]
    prim = primitive([coeff[qd] for qd in basis])
    lhs = {qd: Fraction(c) for qd, c in zip(basis, prim) if c > 0}
    rhs = {qd: Fraction(-c) for qd, c in zip(basis, prim) if c < 0}
    return DivRelation(lhs, rhs)


def push_between(rel: DivRelation, h: GroupSpec, g: GroupSpec,
                 hqds: Optional[Sequence[QuotientDivisor]] = None,
                 gqds: Optional[Sequence[QuotientDivisor]] = None) -> DivRelation:
    """Push a relation on the quotient by ``h`` down to the quotient by ``g`` (``h`` inside ``g``).

    An ``h``-orbit class contributes ``s_h * |Stab_g(D_T)| / (|Stab_h(D_T)| * s_g)``; no rescaling.
    """
    if hqds is None:
        hqds = orbit_divisors(h.n, h)
    if gqds is None:
        gqds = orbit_divisors(g.n, g)
    if not set(h.generators()) <= set(g.elements):
        raise ValueError(f"{h.label} is not a subgroup of {g.label}")
    index = _orbit_index(gqds)
    coeff: dict = {}
    for qd, c in rel.difference().items():
        d = qd.representative
        big = index[d]
        stab_g = Fraction(g.order, len(big.orbit))
        stab_h = Fraction(h.order, len(qd.orbit))
        coeff[big] = coeff.get(big, Fraction(0)) + c * qd.stacky_order * stab_g / (stab_h * big.stacky_order)
    lhs = {k: v for k, v in coeff.items() if v > 0}
    rhs = {k: -v for k, v in coeff.items() if v < 0}
    return DivRelation(lhs, rhs)


def push_along_chain(rel: DivRelation, chain: Sequence[GroupSpec]) -> DivRelation:
    """Push a boundary relation through ``trivial < chain[0] < chain[1] < ...``.

    The first step is made primitive; later steps are exact pushforwards of that.
    """
    out = pushforward_relation(rel, chain[0])
    for h, g in zip(chain, chain[1:]):
        out = push_between(out, h, g)
    return out


def quotient_relations(n: int, g: GroupSpec, qds: Optional[Sequence[QuotientDivisor]] = None) -> list[DivRelation]:
    if qds is None:
        qds = orbit_divisors(n, g)
    return [pushforward_relation(r, g, qds) for r in all_keel_relations(n)]


def relation_matrix(rels: Sequence[DivRelation], basis: Sequence) -> QMatrix:
    return QMatrix([r.vector(basis) for r in rels], cols=len(basis))


def picard_rank(n: int, g: GroupSpec) -> int:
    """Number of boundary orbits minus the rank of the pushed Keel relations."""
    qds = orbit_divisors(n, g)
    return len(qds) - rank(relation_matrix(quotient_relations(n, g, qds), qds))


# ---------------------------------------------------------------------------
# strata


@dataclass(frozen=True)
class QuotientStratum:
    orbit: tuple
    fclass: FPartition
    name: str = ""

    @property
    def representative(self) -> StableTree:
        return self.orbit[0]

    def encoding(self) -> str:
        return self.representative.encoding()

    def __repr__(self):
        return f"{self.name}{self.encoding()}"


def orbit_strata(n: int, g: GroupSpec) -> list[QuotientStratum]:
    """Orbits of one-dimensional boundary strata, sorted by their least member."""
    trees = enumerate_dim1_strata(n)
    uf = UnionFind(trees)
    for p in g.generators():
        for t in trees:
            uf.union(t, t.permuted(p))
    orbits = [tuple(sorted(c, key=StableTree.sort_key)) for c in uf.classes()]
    orbits.sort(key=lambda o: o[0].sort_key())
    return [QuotientStratum(o, fpartition_of(o[0]), f"C{i + 1}") for i, o in enumerate(orbits)]


def quotient_pairing(qd: QuotientDivisor, qs: QuotientStratum) -> Fraction:
    f = qs.fclass
    total = sum(pair_divisor_curve(d, f) for d in qd.orbit)
    return Fraction(qd.stacky_order * total)


def pairing_matrix(qds: Sequence[QuotientDivisor], qss: Sequence[QuotientStratum]) -> QMatrix:
    return QMatrix([[quotient_pairing(d, s) for s in qss] for d in qds], cols=len(qss))


def matrix_csv(qds: Sequence[QuotientDivisor], qss: Sequence[QuotientStratum], marks: Optional[Sequence[bool]] = None) -> str:
    from .exactq import format_q

    m = pairing_matrix(qds, qss)
    header = ["divisor"] + [s.encoding() + ("*" if marks and marks[j] else "") for j, s in enumerate(qss)]
    lines = [",".join(header)]
    for i, d in enumerate(qds):
        lines.append(",".join([d.name] + [format_q(x) for x in m.row(i)]))
    return "\n".join(lines) + "\n"
