"""Weighted stability and the reduction morphism to a Hassett space.

A component of a nodal genus-zero curve is stable when the weights of its marked
points plus its number of nodes exceed 2.  Reduction repeatedly contracts an
unstable component, colliding its markings at the node on the neighbour.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .exactq import EpsRational, QMatrix, format_q, parse_eps, primitive, rank, solve_linear
from .stablegraphs import BoundaryDivisor, DivRelation, StableTree, all_keel_relations
from .symmetry import (GroupSpec, QuotientDivisor, QuotientStratum, S2xS5, S5, orbit_divisors, orbit_strata,
                       push_along_chain, pushforward_relation, quotient_pairing)


@dataclass(frozen=True)
class WeightData:
    """``weights[i]`` is the weight of marking ``i + 1``."""

    weights: tuple

    def __post_init__(self):
        ws = tuple(EpsRational.of(x) for x in self.weights)
        object.__setattr__(self, "weights", ws)
        for i, x in enumerate(ws):
            if not (EpsRational(0) < x <= EpsRational(1)):
                raise ValueError(f"weight of marking {i + 1} is {x}, not in (0,1]")
        if not self.total() > 2:
            raise ValueError(f"total weight {self.total()} must exceed 2")

    @property
    def n(self) -> int:
        return len(self.weights)

    def __call__(self, m: int) -> EpsRational:
        return self.weights[m - 1]

    def total(self, markings: Optional[Iterable[int]] = None) -> EpsRational:
        ms = range(1, self.n + 1) if markings is None else markings
        return sum((self(m) for m in ms), EpsRational(0))

    def classes(self) -> list[EpsRational]:
        return sorted(set(self.weights))

    def light(self) -> frozenset:
        """Markings of the smallest weight (empty if all weights agree)."""
        cl = self.classes()
        if len(cl) < 2:
            return frozenset()
        return frozenset(m for m in range(1, self.n + 1) if self(m) == cl[0])

    def to_json(self) -> dict:
        return {"weights": [{"std": format_q(x.std), "eps": format_q(x.eps)} for x in self.weights]}

    @classmethod
    def from_json(cls, data: Mapping) -> "WeightData":
        ws = []
        for item in data["weights"]:
            if isinstance(item, str):
                ws.append(parse_eps(item))
            else:
                ws.append(EpsRational(Fraction(str(item["std"])), Fraction(str(item.get("eps", "0")))))
        return cls(tuple(ws))


def light_heavy_weights() -> WeightData:
    """Two light points of weight 1/6+e and five heavy points of weight 1/3+e."""
    light = EpsRational(Fraction(1, 6), 1)
    heavy = EpsRational(Fraction(1, 3), 1)
    return WeightData((light, light) + (heavy,) * 5)


def dm_weights(n: int) -> WeightData:
    return WeightData((EpsRational(1),) * n)


def component_stable(legs: Iterable[int], nodes: int, w: WeightData) -> bool:
    return w.total(legs) + nodes > 2


# ---------------------------------------------------------------------------
# weighted curves


@dataclass(frozen=True)
class WeightedCurve:
    """Tree of components; ``points[v]`` is a set of (possibly collided) marked points."""

    n: int
    points: tuple
    edges: frozenset

    @classmethod
    def of_tree(cls, t: StableTree) -> "WeightedCurve":
        pts = tuple(frozenset(frozenset([m]) for m in v) for v in t.vertices)
        return cls(t.n, pts, t.edges)

    def neighbours(self, v: int) -> list[int]:
        return sorted(b if a == v else a for a, b in self.edges if v in (a, b))

    def markings(self, v: int) -> frozenset:
        return frozenset(m for p in self.points[v] for m in p)

    def stable_at(self, v: int, w: WeightData) -> bool:
        return component_stable(self.markings(v), len(self.neighbours(v)), w)

    def dimension(self) -> int:
        return sum(len(self.points[v]) + len(self.neighbours(v)) - 3 for v in range(len(self.points)))

    def collisions(self) -> list[frozenset]:
        return sorted((p for ps in self.points for p in ps if len(p) > 1), key=lambda p: (len(p), sorted(p)))

    def splits(self) -> list[frozenset]:
        """Marking sets cut off by each node (the side away from marking 1)."""
        out = []
        for a, b in sorted(self.edges):
            side = self._beyond(b, a)
            out.append(side if 1 not in side else frozenset(range(1, self.n + 1)) - side)
        return out

    def _beyond(self, v: int, w: int) -> frozenset:
        seen, stack, acc = {w, v}, [v], set()
        while stack:
            x = stack.pop()
            acc |= self.markings(x)
            for y in self.neighbours(x):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return frozenset(acc)

    def contract(self, v: int) -> "WeightedCurve":
        """Contract the leaf component ``v``: its markings collide at its node."""
        nb = self.neighbours(v)
        if len(nb) != 1:
            raise ValueError(f"component {v} is not a leaf")
        u = nb[0]
        merged = self.markings(v)
        pts = list(self.points)
        pts[u] = pts[u] | {merged}
        keep = [x for x in range(len(pts)) if x != v]
        re = {x: i for i, x in enumerate(keep)}
        edges = frozenset(tuple(sorted((re[a], re[b]))) for a, b in self.edges if v not in (a, b))
        return WeightedCurve(self.n, tuple(pts[x] for x in keep), edges)


def reduce_curve(c: WeightedCurve, w: WeightData) -> tuple[WeightedCurve, list[frozenset]]:
    """Contract unstable components until none remain; also returns the contracted marking sets."""
    contracted = []
    while True:
        bad = [v for v in range(len(c.points)) if not c.stable_at(v, w)]
        if not bad:
            return c, contracted
        v = bad[0]
        if len(c.points) == 1:
            raise ValueError("the whole curve is unstable; total weight must exceed 2")
        if len(c.neighbours(v)) != 1:
            # weight + nodes <= 2 with two or more nodes forces an empty component
            raise ValueError("unstable interior component")
        contracted.append(c.markings(v))
        c = c.contract(v)


@dataclass(frozen=True)
class ReductionImage:
    kind: str
    label: str
    dim: int
    codim: int
    curve: WeightedCurve

    def to_json(self) -> dict:
        return {"image_kind": self.kind, "image_label": self.label, "dim": self.dim, "codim": self.codim}


def _kind(codim: int, dim: int) -> str:
    if dim == 0:
        return "point"
    if codim == 1:
        return "divisor"
    if codim == 2:
        return "codim-two"
    if dim == 1:
        return "curve"
    return f"codim-{codim}"


def divisor_label(side: frozenset, w: WeightData) -> str:
    """Name of the boundary divisor of the weighted space cut out by ``side | complement``.

    With two weight classes: ``delta{k}`` when both light points lie on a side of size ``k``,
    ``gamma`` when they are separated.  Otherwise the side is spelled out.
    """
    light = w.light()
    full = frozenset(range(1, w.n + 1))
    if len(light) == 2 and len(w.classes()) == 2:
        for s in (side, full - side):
            if light <= s:
                return f"delta{len(s)}"
        return "gamma"
    s = side if 1 in side else full - side
    return "D_" + "".join(map(str, sorted(s)))


def reduce_stratum(t: Union[StableTree, QuotientDivisor, BoundaryDivisor], w: WeightData) -> ReductionImage:
    if isinstance(t, QuotientDivisor):
        t = t.representative
    if isinstance(t, BoundaryDivisor):
        t = StableTree.of_divisor(t)
    if t.n != w.n:
        raise ValueError("stratum and weights use different marking sets")
    red, _ = reduce_curve(WeightedCurve.of_tree(t), w)
    dim = red.dimension()
    codim = (w.n - 3) - dim
    label = ""
    if codim == 1:
        if red.edges:
            side = red.splits()[0]
        else:
            side = red.collisions()[0]
        label = divisor_label(side, w)
    return ReductionImage(_kind(codim, dim), label, dim, codim, red)


def is_contracted(t: Union[StableTree, QuotientStratum], w: WeightData) -> bool:
    if isinstance(t, QuotientStratum):
        t = t.representative
    return reduce_stratum(t, w).dim < t.dimension()


def contracted_strata(strata: Sequence[QuotientStratum], w: WeightData) -> list[QuotientStratum]:
    return [s for s in strata if is_contracted(s, w)]


def light_end_rule(t: StableTree, w: WeightData) -> bool:
    """The 4-valent component is an end with three marked points, at least one light."""
    light = w.light()
    for v, legs in enumerate(t.vertices):
        if len(legs) == 3 and t.valence(v) == 4 and legs & light:
            return True
    return False


# ---------------------------------------------------------------------------
# pullbacks and the Picard group


def format_class(cls: Mapping, name=str) -> str:
    items = [(k, c) for k, c in cls.items() if c != 0]
    items.sort(key=lambda kc: kc[0].sort_key() if hasattr(kc[0], "sort_key") else str(kc[0]))
    if not items:
        return "0"
    return " + ".join(f"{format_q(c)} {name(k)}" for k, c in items).replace("+ -", "- ")


@dataclass
class HassettSetup:
    """The quotient boundary data together with its reduction images."""

    w: WeightData
    g: GroupSpec
    divisors: list
    strata: list
    images: dict
    contracted: list

    @classmethod
    def build(cls, w: Optional[WeightData] = None, g: Optional[GroupSpec] = None) -> "HassettSetup":
        w = w or light_heavy_weights()
        g = g or S2xS5
        qds = orbit_divisors(w.n, g)
        qss = orbit_strata(w.n, g)
        images = {qd: reduce_stratum(qd, w) for qd in qds}
        return cls(w, g, qds, qss, images, contracted_strata(qss, w))

    def image_labels(self) -> list[str]:
        out = []
        for qd in self.divisors:
            im = self.images[qd]
            if im.kind == "divisor" and im.label not in out:
                out.append(im.label)
        return out

    def contracted_divisors(self) -> list[QuotientDivisor]:
        return [qd for qd in self.divisors if self.images[qd].kind != "divisor"]

    def strict_transform(self, label: str) -> QuotientDivisor:
        hits = [qd for qd in self.divisors if self.images[qd].kind == "divisor" and self.images[qd].label == label]
        if len(hits) != 1:
            raise ValueError(f"{label!r} is the image of {len(hits)} boundary classes, expected exactly one")
        return hits[0]


@lru_cache(maxsize=None)
def default_setup() -> HassettSetup:
    """Two light and five heavy markings, quotient by S2xS5."""
    return HassettSetup.build()


def pullback_along_h(target: str, setup: Optional[HassettSetup] = None) -> dict:
    """Class of ``h^* target`` on the quotient, solved from zero intersection with contracted curves."""
    s = setup or default_setup()
    strict = s.strict_transform(target)
    exc = s.contracted_divisors()
    A = QMatrix([[quotient_pairing(e, c) for e in exc] for c in s.contracted], cols=len(exc))
    b = [-quotient_pairing(strict, c) for c in s.contracted]
    sol = solve_linear(A, b)
    if sol is None:
        raise ValueError(f"no pullback of {target}: the contracted curves give an inconsistent system")
    if rank(A) < len(exc):
        raise ValueError(f"pullback of {target} is not determined by the contracted curves")
    out = {strict: Fraction(1)}
    out.update({e: a for e, a in zip(exc, sol) if a != 0})
    return out


def pairing_with(cls: Mapping, c: QuotientStratum) -> Fraction:
    return sum((coef * quotient_pairing(qd, c) for qd, coef in cls.items()), Fraction(0))


@dataclass(frozen=True)
class PicardPresentation:
    generators: tuple
    relations: tuple
    rank: int

    def format(self) -> list[str]:
        return [r.format() for r in self.relations]


def default_chain(g: GroupSpec) -> list[GroupSpec]:
    """Quotient tower used to present pushed relations; S2xS5 is reached through S5."""
    if g.name == "S2xS5":
        return [S5, S2xS5]
    return [g]


def push_to_hassett(rel: DivRelation, setup: HassettSetup) -> DivRelation:
    """Send each class to its image divisor (coefficient 1) and drop contracted classes."""
    coeff: dict = {}
    for qd, c in rel.difference().items():
        im = setup.images[qd]
        if im.kind == "divisor":
            coeff[im.label] = coeff.get(im.label, Fraction(0)) + c
    lhs = {k: v for k, v in coeff.items() if v > 0}
    rhs = {k: -v for k, v in coeff.items() if v < 0}
    return DivRelation(lhs, rhs)


def picard_presentation(w: Optional[WeightData] = None, g: Optional[GroupSpec] = None,
                        setup: Optional[HassettSetup] = None) -> PicardPresentation:
    s = setup or HassettSetup.build(w, g)
    gens = tuple(s.image_labels())
    chain = default_chain(s.g)
    rels, rows = [], []
    for r in all_keel_relations(s.w.n):
        pushed = push_to_hassett(push_along_chain(r, chain), s)
        v = pushed.vector(gens)
        if rank(QMatrix(rows + [v], cols=len(gens))) > len(rows):
            rows.append(v)
            rels.append(pushed)
    # contracted classes are independent of the relations exactly when the rank drops by their number
    return PicardPresentation(gens, tuple(rels), len(gens) - len(rows))


def picard_rank_after_contraction(setup: HassettSetup) -> int:
    """Rank of Pic of the quotient modulo the contracted divisors, computed on the quotient side."""
    qds = setup.divisors
    rows = [pushforward_relation(r, setup.g, qds).vector(qds) for r in all_keel_relations(setup.w.n)]
    for e in setup.contracted_divisors():
        rows.append(tuple(Fraction(1 if qd == e else 0) for qd in qds))
    return len(qds) - rank(QMatrix(rows, cols=len(qds)))


def nef_inequalities(setup: Optional[HassettSetup] = None) -> list[tuple[int, ...]]:
    """Normals on the image basis whose nonnegativity means nef: pulled-back pairings with all strata."""
    s = setup or default_setup()
    gens = s.image_labels()
    pres = picard_presentation(setup=s)
    basis = _independent_labels(gens, pres)
    pbs = [pullback_along_h(lbl, s) for lbl in basis]
    out = []
    for c in s.strata:
        n = primitive([pairing_with(pb, c) for pb in pbs])
        if any(n) and n not in out:
            out.append(n)
    return out


def _independent_labels(gens: Sequence[str], pres: PicardPresentation) -> list[str]:
    """Drop generators eliminated by the relations, from the end."""
    keep = list(gens)
    for r in pres.relations:
        v = r.vector(gens)
        for lbl, c in reversed(list(zip(gens, v))):
            if c != 0 and lbl in keep:
                keep.remove(lbl)
                break
    return keep
