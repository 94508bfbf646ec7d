"""Exact rational polyhedral cones and polytopes.

H-form cones are ``{x : n.x >= 0 for n in normals, e.x = 0 for e in equations}``;
V-form cones are ``cone(rays) + span(lineality)``.  Conversion uses the double
description method on the pointed part after splitting off the lineality space.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Iterable, Optional, Sequence

from .exactq import QMatrix, canonical_line, det, dot, kernel_basis, primitive, rank, solve_linear, vec


def _prim_set(vs: Iterable, line: bool = False) -> tuple:
    out = set()
    for v in vs:
        p = canonical_line(v) if line else primitive(v)
        if any(p):
            out.add(p)
    return tuple(sorted(out))


@dataclass(frozen=True)
class ConeH:
    dim: int
    normals: tuple = ()
    equations: tuple = ()

    def __post_init__(self):
        for v in tuple(self.normals) + tuple(self.equations):
            if len(v) != self.dim:
                raise ValueError(f"vector {tuple(v)} is not of length {self.dim}")
        object.__setattr__(self, "normals", _prim_set(self.normals))
        object.__setattr__(self, "equations", _echelon_lines(self.equations, self.dim))


@dataclass(frozen=True)
class ConeV:
    dim: int
    rays: tuple = ()
    lineality: tuple = ()

    def __post_init__(self):
        for v in tuple(self.rays) + tuple(self.lineality):
            if len(v) != self.dim:
                raise ValueError(f"vector {tuple(v)} is not of length {self.dim}")
        lin = _echelon_lines(self.lineality, self.dim)
        object.__setattr__(self, "lineality", lin)
        object.__setattr__(self, "rays", _prim_set(self.rays))

    @property
    def is_pointed(self) -> bool:
        return not self.lineality


def _echelon_lines(vs: Iterable, dim: int) -> tuple:
    """Canonical basis of the span of ``vs`` (rows of the reduced echelon form, made primitive)."""
    vs = [vec(v) for v in vs]
    if not vs:
        return ()
    # kernel of the kernel gives a canonical spanning set
    ker = kernel_basis(QMatrix(vs, cols=dim))
    if not ker:
        return tuple(sorted(tuple(1 if i == j else 0 for i in range(dim)) for j in range(dim)))
    return tuple(sorted(kernel_basis(QMatrix(ker, cols=dim))))


def _double_description(M: Sequence[Sequence[Fraction]], r: int) -> list[tuple]:
    """Extreme rays of the pointed cone ``{y in Q^r : M y >= 0}``; ``M`` must have rank ``r``."""
    rows = [vec(m) for m in M]
    # initial simplicial cone from the first r independent rows
    basis: list[int] = []
    for i, row in enumerate(rows):
        if rank(QMatrix([rows[j] for j in basis] + [row], cols=r)) > len(basis):
            basis.append(i)
        if len(basis) == r:
            break
    if len(basis) < r:
        raise ValueError("inequality system is not of full rank")
    B = QMatrix([rows[i] for i in basis], cols=r)
    rays = []
    for j in range(r):
        e = [1 if i == j else 0 for i in range(r)]
        rays.append(vec(primitive(solve_linear(B, e))))
    processed = list(basis)
    for i, a in enumerate(rows):
        if i in basis:
            continue
        vals = [dot(a, y) for y in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        zero = [k for k, v in enumerate(vals) if v == 0]
        if not neg:
            processed.append(i)
            continue
        zsets = [frozenset(p for p in processed if dot(rows[p], y) == 0) for y in rays]
        new = []
        for p in pos:
            for m in neg:
                common = zsets[p] & zsets[m]
                if len(common) < r - 2:
                    continue
                if any(k != p and k != m and common <= zsets[k] for k in range(len(rays))):
                    continue
                y = tuple(vals[p] * u - vals[m] * w for u, w in zip(rays[m], rays[p]))
                new.append(vec(primitive(y)))
        rays = [rays[k] for k in pos + zero] + new
        processed.append(i)
    return rays


def h_to_v(c: ConeH) -> ConeV:
    d = c.dim
    A = [vec(n) for n in c.normals]
    E = [vec(e) for e in c.equations]
    lin = kernel_basis(QMatrix(A + E, cols=d)) if (A or E) else kernel_basis(QMatrix.zeros(1, d))
    W = kernel_basis(QMatrix(E + [vec(l) for l in lin], cols=d)) if (E or lin) else [
        tuple(1 if i == j else 0 for i in range(d)) for j in range(d)]
    if not W or not A:
        return ConeV(d, (), tuple(lin))
    Bm = QMatrix(W, cols=d).T  # d x r, columns span the pointed part's ambient space
    r = Bm.cols
    M = [Bm.T @ a for a in A]  # rows a.B
    ys = _double_description(M, r)
    rays = [Bm @ y for y in ys]
    return ConeV(d, tuple(rays), tuple(lin))


def v_to_h(c: ConeV) -> ConeH:
    gens = list(c.rays) + list(c.lineality)
    dual = ConeH(c.dim, tuple(c.rays), tuple(c.lineality)) if gens else ConeH(c.dim)
    dv = h_to_v(dual)
    return ConeH(c.dim, dv.rays, dv.lineality)


def minimal(c: ConeV) -> ConeV:
    """Drop non-extremal generators."""
    return h_to_v(v_to_h(c))


def member(c, x: Sequence) -> bool:
    x = vec(x)
    if len(x) != c.dim:
        raise ValueError("dimension mismatch")
    if isinstance(c, ConeH):
        return all(dot(n, x) >= 0 for n in c.normals) and all(dot(e, x) == 0 for e in c.equations)
    if not any(x):
        return True
    gens = [vec(r) for r in c.rays] + [vec(l) for l in c.lineality] + [vec(-v for v in l) for l in c.lineality]
    if not gens:
        return False
    rk = rank(QMatrix(gens, cols=c.dim))
    if rank(QMatrix(gens + [x], cols=c.dim)) > rk:
        return False
    # Caratheodory: x lies in the cone of some linearly independent subset, extendable to a basis
    for sub in combinations(range(len(gens)), rk):
        G = QMatrix([gens[i] for i in sub], cols=c.dim)
        if rank(G) < rk:
            continue
        lam = solve_linear(G.T, x)
        if lam is not None and all(l >= 0 for l in lam):
            return True
    return False


def nonnegative_combination(rays: Sequence[Sequence], x: Sequence) -> Optional[tuple[Fraction, ...]]:
    """Some ``lam >= 0`` with ``sum lam_i rays_i = x`` supported on independent rays, or None."""
    x = vec(x)
    gens = [vec(r) for r in rays]
    if not any(x):
        return tuple(Fraction(0) for _ in gens)
    dim = len(x)
    rk = rank(QMatrix(gens, cols=dim))
    for sub in combinations(range(len(gens)), rk):
        G = QMatrix([gens[i] for i in sub], cols=dim)
        if rank(G) < rk:
            continue
        lam = solve_linear(G.T, x)
        if lam is not None and all(l >= 0 for l in lam):
            out = [Fraction(0)] * len(gens)
            for i, l in zip(sub, lam):
                out[i] = l
            return tuple(out)
    return None


def dual(c):
    """Dual cone, in the other representation."""
    if isinstance(c, ConeH):
        return ConeV(c.dim, c.normals, c.equations)
    return ConeH(c.dim, c.rays, c.lineality)


def preimage(c: ConeH, M: QMatrix) -> ConeH:
    """``{x : M x in c}`` for a linear map ``M`` (rows = target coordinates)."""
    return ConeH(M.cols, tuple(M.T @ n for n in c.normals), tuple(M.T @ e for e in c.equations))


# ---------------------------------------------------------------------------
# polytopes


@dataclass(frozen=True)
class Polytope:
    dim: int
    vertices: tuple = ()

    def __post_init__(self):
        pts = {vec(v) for v in self.vertices}
        for v in pts:
            if len(v) != self.dim:
                raise ValueError(f"point {v} is not of length {self.dim}")
        object.__setattr__(self, "vertices", tuple(sorted(_extreme_points(pts, self.dim))))

    def homogenized(self) -> ConeV:
        return ConeV(self.dim + 1, tuple(v + (Fraction(1),) for v in self.vertices))

    def affine_dimension(self) -> int:
        if not self.vertices:
            return -1
        v0 = self.vertices[0]
        diffs = [tuple(a - b for a, b in zip(v, v0)) for v in self.vertices[1:]]
        return rank(QMatrix(diffs, cols=self.dim)) if diffs else 0


def _extreme_points(pts, dim: int) -> list:
    if len(pts) <= 1:
        return list(pts)
    cone = minimal(ConeV(dim + 1, tuple(p + (Fraction(1),) for p in pts)))
    return [tuple(x / r[-1] for x in r[:-1]) for r in (vec(r) for r in cone.rays)]


def facets(p: Polytope) -> list[tuple[tuple, tuple]]:
    """Facets as (homogeneous normal, vertex tuple) pairs; the normal n satisfies n.(v,1) >= 0."""
    h = v_to_h(p.homogenized())
    out = []
    for n in h.normals:
        verts = tuple(v for v in p.vertices if dot(n, v + (Fraction(1),)) == 0)
        out.append((n, verts))
    return out


def triangulate(p: Polytope) -> list[tuple]:
    """Pulling triangulation: cone from the least vertex over the facets missing it."""
    k = p.affine_dimension()
    if k <= 0:
        return [tuple(p.vertices)] if p.vertices else []
    v0 = p.vertices[0]
    out = []
    for _, verts in facets(p):
        if v0 in verts:
            continue
        for simplex in triangulate(Polytope(p.dim, verts)):
            out.append((v0,) + simplex)
    return out


@dataclass(frozen=True)
class VolumeReport:
    euclidean: Fraction
    normalized: Fraction
    full_dimensional: bool


def polytope_volume(p: Polytope) -> VolumeReport:
    d = p.dim
    if p.affine_dimension() < d:
        return VolumeReport(Fraction(0), Fraction(0), False)
    total = Fraction(0)
    for s in triangulate(p):
        v0 = s[0]
        total += abs(det(QMatrix([tuple(a - b for a, b in zip(v, v0)) for v in s[1:]], cols=d)))
    vol = total / factorial(d)
    return VolumeReport(vol, total, True)


def normalized_volume(p: Polytope, normalized: bool = True) -> Fraction:
    """``dim! * vol`` (or plain volume when ``normalized`` is False); 0 if not full-dimensional."""
    rep = polytope_volume(p)
    return rep.normalized if normalized else rep.euclidean


def clip(p: Polytope, normal: Sequence, offset) -> Polytope:
    """``p`` intersected with the half-space ``normal . x >= offset``."""
    h = v_to_h(p.homogenized())
    cut = tuple(vec(normal)) + (-Fraction(offset),)
    cone = h_to_v(ConeH(p.dim + 1, h.normals + (cut,), h.equations))
    verts = [tuple(x / r[-1] for x in r[:-1]) for r in (vec(r) for r in cone.rays) if r[-1] > 0]
    return Polytope(p.dim, tuple(verts))


# ---------------------------------------------------------------------------
# brute-force references, for cross-checking the double description code


def brute_force_rays(c: ConeH) -> tuple:
    """Extreme rays of a pointed full-dimensional H-cone by enumerating (d-1)-subsets of normals."""
    d = c.dim
    out = set()
    for sub in combinations(c.normals, d - 1):
        ker = kernel_basis(QMatrix(list(sub) + list(c.equations), cols=d))
        if len(ker) != 1:
            continue
        for sgn in (1, -1):
            r = tuple(sgn * x for x in ker[0])
            if all(sum(a * b for a, b in zip(n, r)) >= 0 for n in c.normals):
                out.add(primitive(r))
    return tuple(sorted(out))


def brute_force_facets(rays: Sequence[Sequence]) -> tuple:
    """Facet normals of a full-dimensional pointed cone spanned by ``rays``."""
    rays = [vec(r) for r in rays]
    d = len(rays[0])
    out = set()
    for sub in combinations(rays, d - 1):
        ker = kernel_basis(QMatrix(list(sub), cols=d))
        if len(ker) != 1:
            continue
        for sgn in (1, -1):
            n = tuple(sgn * x for x in ker[0])
            if all(sum(a * b for a, b in zip(n, r)) >= 0 for r in rays):
                out.add(primitive(n))
    return tuple(sorted(out))
