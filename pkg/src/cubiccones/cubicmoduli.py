"""Divisor lattices, covers, cones and top intersections for moduli of cubic surfaces.

Class tables live in ``data/spaces.json``; everything else is computed from them
and from the Hassett-space nef cone.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import prod
from typing import Mapping, Optional, Sequence, Union

from .exactq import QMatrix, format_q, primitive, q, solve_linear, vec
from .polyhedra import ConeH, ConeV, h_to_v, preimage, v_to_h

SPACES = ("git", "toroidal", "kirwan", "line", "marked")


@lru_cache(maxsize=None)
def load_manifest() -> dict:
    with resources.files("cubiccones").joinpath("data/spaces.json").open() as fh:
        return json.load(fh)


@dataclass(frozen=True)
class Identity:
    name: str
    lhs: tuple
    rhs: tuple
    known_inconsistent: bool = False


@dataclass(frozen=True)
class PicLattice:
    space: str
    basis: tuple
    cone_basis: tuple
    classes: Mapping = field(default_factory=dict)
    identities: tuple = ()

    def vector(self, x: Union[str, Mapping, Sequence]) -> tuple[Fraction, ...]:
        """Coordinates on ``basis`` of a class name, a ``{name: coef}`` expression or a raw vector."""
        if isinstance(x, str):
            if x in self.basis:
                return tuple(Fraction(int(b == x)) for b in self.basis)
            if x not in self.classes:
                raise KeyError(f"no class {x!r} on {self.space}")
            return self.classes[x]
        if isinstance(x, Mapping):
            out = [Fraction(0)] * len(self.basis)
            for name, c in x.items():
                for i, v in enumerate(self.vector(name)):
                    out[i] += q(c) * v
            return tuple(out)
        v = vec(x)
        if len(v) != len(self.basis):
            raise ValueError("dimension mismatch")
        return v

    def _cone_matrix(self) -> QMatrix:
        # columns are the cone basis classes in lattice coordinates
        return QMatrix([self.vector(n) for n in self.cone_basis], cols=len(self.basis)).T

    def cone_coords(self, x) -> tuple[Fraction, ...]:
        sol = solve_linear(self._cone_matrix(), self.vector(x))
        if sol is None:
            raise ValueError("class not in the span of the cone basis")
        return sol

    def from_cone_coords(self, c: Sequence) -> tuple[Fraction, ...]:
        return self._cone_matrix() @ c

    def check_identities(self) -> list[tuple[Identity, bool, tuple, tuple]]:
        out = []
        for ident in self.identities:
            lv = self.vector(dict(ident.lhs))
            rv = self.vector(dict(ident.rhs))
            out.append((ident, lv == rv, lv, rv))
        return out


def _expr(d: Mapping) -> tuple:
    return tuple((k, Fraction(v)) for k, v in d.items())


def standard_lattice(space: str) -> PicLattice:
    spaces = load_manifest()["spaces"]
    if space not in spaces:
        raise KeyError(f"unknown space {space!r}; expected one of {', '.join(SPACES)}")
    s = spaces[space]
    classes = {k: vec(Fraction(x) for x in v) for k, v in s["classes"].items()}
    idents = tuple(Identity(i["name"], _expr(i["lhs"]), _expr(i["rhs"]), bool(i.get("known_inconsistent")))
                   for i in s["identities"])
    return PicLattice(space, tuple(s["basis"]), tuple(s["cone_basis"]), classes, idents)


# ---------------------------------------------------------------------------
# covers


@dataclass(frozen=True)
class CoverMap:
    """Finite cover ``source -> target``; matrices act on cone-basis coordinates."""

    source: str
    target: str
    degree: int
    pull: QMatrix
    push: QMatrix
    named_pull: Mapping = field(default_factory=dict)
    named_push: Mapping = field(default_factory=dict)

    def pull_class(self, x) -> tuple[Fraction, ...]:
        """Pullback of a target class (name, expression or cone coordinates) in source cone coordinates."""
        tgt = standard_lattice(self.target)
        if isinstance(x, (str, Mapping)):
            x = tgt.cone_coords(x)
        return self.pull @ x

    def push_class(self, y) -> tuple[Fraction, ...]:
        src = standard_lattice(self.source)
        if isinstance(y, (str, Mapping)):
            y = src.cone_coords(y)
        return self.push @ y

    def composite(self) -> QMatrix:
        return self.push @ self.pull


def _cover_matrix(table: Mapping, rows: Sequence[str], cols: Sequence[str]) -> QMatrix:
    return QMatrix([[Fraction(table.get(c, {}).get(r, "0")) for c in cols] for r in rows], cols=len(cols))


def line_cover() -> CoverMap:
    c = load_manifest()["covers"]["line"]
    src = standard_lattice(c["source"])
    tgt = standard_lattice(c["target"])
    pull = _cover_matrix(c["pull"], src.cone_basis, tgt.cone_basis)
    push = _cover_matrix(c["push"], tgt.cone_basis, src.cone_basis)
    named_pull = {k: _expr(v) for k, v in c["named_pull"].items()}
    named_push = {k: _expr(v) for k, v in c["named_push"].items()}
    return CoverMap(c["source"], c["target"], c["degree"], pull, push, named_pull, named_push)


def marked_transport(ray: Sequence) -> tuple[int, ...]:
    """Pull an unmarked class ``a T_A1 + b T3A2`` to the marked space: ramification 2 on the discriminant."""
    a, b = vec(ray)
    return primitive((2 * a, b))


# ---------------------------------------------------------------------------
# cones

# Nef cone of the Hassett space in (delta2, delta4, delta5), as stated inequalities (a, b, c)
HASSETT_NEF_INEQUALITIES = ((2, -1, 2), (0, 1, -2), (1, 0, 0), (-1, 1, 0), (0, -1, 6), (0, 0, 1), (0, 1, 2))


def hassett_nef_cone(computed: bool = True) -> ConeV:
    """Nef cone of the Hassett space, from F-curve pairings of pulled-back classes or from the stated list."""
    if computed:
        from .hassett import default_setup, nef_inequalities

        normals = nef_inequalities(default_setup())
    else:
        normals = HASSETT_NEF_INEQUALITIES
    return h_to_v(ConeH(3, tuple(normals)))


def nef_cone(space: str, hassett_nef: Optional[ConeV] = None) -> ConeV:
    if hassett_nef is None:
        hassett_nef = hassett_nef_cone()
    if space == "line":
        return hassett_nef
    if space == "toroidal":
        # a class is nef iff its pullback along the finite line cover is
        return h_to_v(preimage(v_to_h(hassett_nef), line_cover().pull))
    if space == "marked":
        return ConeV(2, tuple(marked_transport(r) for r in nef_cone("toroidal", hassett_nef).rays))
    raise KeyError(f"no nef cone for space {space!r}")


def eff_cone(space: str) -> ConeV:
    if space == "line":
        return ConeV(3, ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    if space == "toroidal":
        # pushforward of effective generators upstairs
        cov = line_cover()
        return ConeV(2, tuple(cov.push.col(j) for j in range(cov.push.cols)))
    if space == "marked":
        return ConeV(2, tuple(marked_transport(r) for r in eff_cone("toroidal").rays))
    raise KeyError(f"no effective cone for space {space!r}")


# ---------------------------------------------------------------------------
# numbers


def slope(lattice: PicLattice, x) -> Fraction:
    """lambda-coefficient over minus the boundary coefficient, on a (lambda, boundary) basis."""
    if len(lattice.basis) != 2 or lattice.basis[0] != "lambda":
        raise ValueError(f"slope needs a (lambda, boundary) basis, not {lattice.basis}")
    a, b = lattice.vector(x)
    if b == 0:
        raise ZeroDivisionError("slope undefined: no boundary component")
    return a / -b


@dataclass(frozen=True)
class TopRing:
    """Degree-four intersections on a two-generator Picard group with vanishing mixed terms."""

    generators: tuple
    fourth_powers: tuple

    def __post_init__(self):
        object.__setattr__(self, "fourth_powers", vec(self.fourth_powers))


def top_intersection(ring: TopRing, cls: Sequence) -> Fraction:
    x, y = vec(cls)
    a4, b4 = ring.fourth_powers
    return x ** 4 * a4 + y ** 4 * b4


def weighted_projective_degree(weights: Sequence[int]) -> Fraction:
    """``O(1)^dim`` on the weighted projective space with these weights."""
    return Fraction(1, prod(weights))


def hodge_fourth_power() -> Fraction:
    m = load_manifest()
    return weighted_projective_degree(m["gitweights"]) / Fraction(m["hodge_multiple"]) ** 4


def exceptional_fourth_power(vol, s, m: int) -> Fraction:
    """``(1/m) * (-L/s)^3`` where ``L^3 = 3! * vol``."""
    vol, s = q(vol), q(s)
    if vol <= 0 or s == 0 or m < 1:
        raise ValueError("need vol > 0, s != 0 and m >= 1")
    return Fraction(1, m) * (-1 / s) ** 3 * 6 * vol


def standard_ring(space: str) -> TopRing:
    r = load_manifest()["rings"][space]
    return TopRing(tuple(r["generators"]), tuple(Fraction(x) for x in r["fourth_powers"]))


def kirwan_ring(vol=None) -> TopRing:
    """The Kirwan ring with the exceptional fourth power recomputed from the polytope volume."""
    e = load_manifest()["exceptional"]["kirwan"]
    vol = Fraction(e["volume"]) if vol is None else q(vol)
    d4 = exceptional_fourth_power(vol, Fraction(e["scale"]), e["quotient_order"])
    return TopRing(("lambda", "D3A2"), (hodge_fourth_power(), d4))


def canonical_fourth_power(space: str, ring: Optional[TopRing] = None) -> Fraction:
    lat = standard_lattice(space)
    ring = ring or standard_ring(space)
    return top_intersection(ring, lat.vector("K"))


def inconsistencies() -> list[tuple[str, str, tuple, tuple]]:
    """Identities in the tables that fail; those marked as known are reported, not raised."""
    out = []
    for space in SPACES:
        for ident, ok, lv, rv in standard_lattice(space).check_identities():
            if not ok:
                out.append((space, ident.name, lv, rv))
    return out


def format_vector(v: Sequence) -> str:
    return "(" + ", ".join(format_q(x) for x in v) + ")"
