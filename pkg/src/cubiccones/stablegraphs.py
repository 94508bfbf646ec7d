"""Boundary divisors, one-dimensional boundary strata and Keel relations on M_{0,n}.

Markings are the integers ``1..n``.  A boundary divisor ``D_T`` is stored by the
side of the split that contains marking 1.  One-dimensional strata are stable
trees with a single 4-valent vertex; their numerical class is the F-curve of the
partition of markings into the four branches at that vertex.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Hashable, Iterable, Iterator, Mapping, Sequence, Union

from .exactq import format_q, primitive, q


def _markings(n: int) -> frozenset[int]:
    return frozenset(range(1, n + 1))


def _setkey(s: Iterable[int]) -> tuple:
    s = sorted(s)
    return (len(s), s)


def _setlabel(s: Iterable[int]) -> str:
    s = sorted(s)
    if all(x < 10 for x in s):
        return "".join(map(str, s))
    return ",".join(map(str, s))


@dataclass(frozen=True)
class BoundaryDivisor:
    """``D_T`` on M_{0,n}; ``side`` is always the half containing marking 1."""

    n: int
    side: frozenset

    def __post_init__(self):
        side = frozenset(self.side)
        full = _markings(self.n)
        if not side <= full:
            raise ValueError(f"markings {sorted(side - full)} out of range 1..{self.n}")
        if 1 not in side:
            side = full - side
        if not 2 <= len(side) <= self.n - 2:
            raise ValueError(f"side {sorted(side)} does not define a boundary divisor of M_0,{self.n}")
        object.__setattr__(self, "side", side)

    @property
    def complement(self) -> frozenset:
        return _markings(self.n) - self.side

    def sides(self) -> tuple[frozenset, frozenset]:
        return self.side, self.complement

    def sort_key(self):
        return _setkey(self.side)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    @property
    def label(self) -> str:
        return "D_" + _setlabel(self.side)

    def to_json(self) -> list[int]:
        return sorted(self.side)

    def permuted(self, perm: Mapping[int, int]) -> "BoundaryDivisor":
        return BoundaryDivisor(self.n, frozenset(perm[i] for i in self.side))

    def __repr__(self):
        return self.label


def enumerate_boundary_divisors(n: int) -> list[BoundaryDivisor]:
    if n < 4:
        raise ValueError("M_0,n has boundary divisors only for n >= 4")
    rest = list(range(2, n + 1))
    out = []
    for k in range(1, n - 2):
        for extra in combinations(rest, k):
            out.append(BoundaryDivisor(n, frozenset((1,) + extra)))
    return sorted(out)


@dataclass(frozen=True)
class FPartition:
    """Partition of the markings into the four branches of a 4-valent vertex."""

    n: int
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(sorted((frozenset(b) for b in self.blocks), key=lambda b: (len(b), min(b))))
        if len(blocks) != 4:
            raise ValueError("an F-partition has exactly 4 blocks")
        if any(not b for b in blocks):
            raise ValueError("empty block")
        union = frozenset().union(*blocks)
        if sum(map(len, blocks)) != len(union) or union != _markings(self.n):
            raise ValueError("blocks must be disjoint and cover 1..n")
        object.__setattr__(self, "blocks", blocks)

    def permuted(self, perm: Mapping[int, int]) -> "FPartition":
        return FPartition(self.n, tuple(frozenset(perm[i] for i in b) for b in self.blocks))

    def sort_key(self):
        return tuple(_setkey(b) for b in self.blocks)

    def to_json(self) -> list[list[int]]:
        return [sorted(b) for b in self.blocks]

    def __repr__(self):
        return "F(" + "|".join(_setlabel(b) for b in self.blocks) + ")"


def pair_divisor_curve(d: BoundaryDivisor, f: FPartition) -> int:
    """Intersection number of ``D_T`` with the F-curve of ``f``."""
    if d.n != f.n:
        raise ValueError("divisor and curve live on different M_0,n")
    for s in d.sides():
        if s in f.blocks:
            return -1
    for a, b in combinations(f.blocks, 2):
        if a | b == d.side:
            return 1
    return 0


# ---------------------------------------------------------------------------
# relations


@dataclass(frozen=True)
class DivRelation:
    """``sum lhs = sum rhs`` between divisor classes with rational coefficients."""

    lhs: Mapping[Hashable, Fraction]
    rhs: Mapping[Hashable, Fraction]

    def difference(self) -> dict:
        out: dict = {}
        for k, c in self.lhs.items():
            out[k] = out.get(k, Fraction(0)) + q(c)
        for k, c in self.rhs.items():
            out[k] = out.get(k, Fraction(0)) - q(c)
        return {k: c for k, c in out.items() if c != 0}

    def vector(self, basis: Sequence[Hashable]) -> tuple[Fraction, ...]:
        diff = self.difference()
        extra = set(diff) - set(basis)
        if extra:
            raise KeyError(f"relation mentions classes outside the basis: {sorted(map(str, extra))}")
        return tuple(diff.get(b, Fraction(0)) for b in basis)

    def equals_up_to_scale(self, other: "DivRelation", basis: Sequence[Hashable]) -> bool:
        return primitive(self.vector(basis)) == primitive(other.vector(basis))

    def format(self, name=str) -> str:
        def side(terms):
            items = [(k, q(c)) for k, c in terms.items() if c != 0]
            items.sort(key=lambda kc: _sort_key(kc[0]))
            return " + ".join(f"{format_q(c)} {name(k)}" for k, c in items) or "0"

        return f"{side(self.lhs)} = {side(self.rhs)}"


def _sort_key(k):
    return k.sort_key() if hasattr(k, "sort_key") else (str(k),)


def keel_relation(n: int, i: int, j: int, k: int, l: int) -> DivRelation:
    """``sum_{i,j in T; k,l not in T} D_T = sum_{i,k in T; j,l not in T} D_T``."""
    quad = (i, j, k, l)
    if len(set(quad)) != 4:
        raise ValueError("Keel relation needs four distinct markings")
    if not all(1 <= x <= n for x in quad):
        raise ValueError(f"markings must lie in 1..{n}")
    others = sorted(_markings(n) - set(quad))

    def side(a, b):
        terms = {}
        for r in range(len(others) + 1):
            for extra in combinations(others, r):
                terms[BoundaryDivisor(n, frozenset((a, b) + extra))] = Fraction(1)
        return terms

    return DivRelation(side(i, j), side(i, k))


def all_keel_relations(n: int) -> list[DivRelation]:
    """Two Keel relations per 4-subset; together they span all relations."""
    rels = []
    for i, j, k, l in combinations(range(1, n + 1), 4):
        rels.append(keel_relation(n, i, j, k, l))
        rels.append(keel_relation(n, i, j, l, k))
    return rels


# ---------------------------------------------------------------------------
# stable trees

Branch = Union[int, list]


@dataclass(frozen=True)
class StableTree:
    """Dual tree of a boundary stratum: ``vertices[v]`` is the leg set of vertex ``v``."""

    n: int
    vertices: tuple
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        verts = tuple(frozenset(v) for v in self.vertices)
        edges = frozenset(tuple(sorted(e)) for e in self.edges)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)
        self._validate()

    def _validate(self):
        legs = [x for v in self.vertices for x in v]
        if sorted(legs) != list(range(1, self.n + 1)):
            raise ValueError("legs must be exactly 1..n, each once")
        nv = len(self.vertices)
        if len(self.edges) != nv - 1:
            raise ValueError("not a tree: wrong number of edges")
        if any(a == b or not (0 <= a < nv and 0 <= b < nv) for a, b in self.edges):
            raise ValueError("bad edge")
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in self.neighbours(v):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != nv:
            raise ValueError("not a tree: disconnected")
        for v in range(nv):
            if self.valence(v) < 3:
                raise ValueError(f"vertex {v} has valence {self.valence(v)} < 3")

    @classmethod
    def from_branches(cls, n: int, branches: Sequence[Branch]) -> "StableTree":
        """Build from nested lists: an int is a leg, a list is an edge to a new vertex."""
        vertices: list[set] = []
        edges = []

        def build(items) -> int:
            v = len(vertices)
            vertices.append(set())
            for it in items:
                if isinstance(it, int):
                    vertices[v].add(it)
                else:
                    w = build(it)
                    edges.append((v, w))
            return v

        build(branches)
        return cls(n, tuple(vertices), frozenset(edges))

    @classmethod
    def of_divisor(cls, d: BoundaryDivisor) -> "StableTree":
        return cls(d.n, (d.side, d.complement), frozenset({(0, 1)}))

    def neighbours(self, v: int) -> list[int]:
        return sorted([b for a, b in self.edges if a == v] + [a for a, b in self.edges if b == v])

    def valence(self, v: int) -> int:
        return len(self.vertices[v]) + len(self.neighbours(v))

    def dimension(self) -> int:
        return sum(self.valence(v) - 3 for v in range(len(self.vertices)))

    def codimension(self) -> int:
        return len(self.edges)

    def _beyond(self, v: int, w: int) -> frozenset:
        """Markings on the far side of edge v-w, seen from v."""
        out = set()
        stack, seen = [w], {v, w}
        while stack:
            x = stack.pop()
            out |= self.vertices[x]
            for y in self.neighbours(x):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return frozenset(out)

    def branches_at(self, v: int) -> list[frozenset]:
        return [frozenset({x}) for x in sorted(self.vertices[v])] + [
            self._beyond(v, w) for w in self.neighbours(v)
        ]

    def splits(self) -> frozenset:
        """The boundary divisors containing this stratum, one per edge."""
        return frozenset(BoundaryDivisor(self.n, self._beyond(a, b)) for a, b in self.edges)

    def permuted(self, perm: Mapping[int, int]) -> "StableTree":
        return StableTree(self.n, tuple(frozenset(perm[i] for i in v) for v in self.vertices), self.edges)

    def root(self) -> int:
        four = [v for v in range(len(self.vertices)) if self.valence(v) == 4]
        if len(four) == 1:
            return four[0]
        return next(v for v, legs in enumerate(self.vertices) if 1 in legs)

    def nested(self, root: int | None = None) -> list:
        """Nested-list encoding rooted at ``root`` with branches in canonical order."""
        if root is None:
            root = self.root()

        def enc(v, parent):
            items: list = sorted(self.vertices[v])
            subs = [enc(w, v) for w in self.neighbours(v) if w != parent]
            subs.sort(key=_branch_key)
            return items + subs

        return enc(root, None)

    def encoding(self) -> str:
        return _branch_str(self.nested())

    def sort_key(self):
        return _branch_key(self.nested())

    def __eq__(self, other):
        return isinstance(other, StableTree) and self.n == other.n and self.splits() == other.splits()

    def __hash__(self):
        return hash((self.n, self.splits()))

    def __repr__(self):
        return f"StableTree({self.encoding()})"


def _branch_str(b) -> str:
    if isinstance(b, int):
        return str(b)
    return "(" + " ".join(_branch_str(x) for x in b) + ")"


def _flat(b) -> list[int]:
    if isinstance(b, int):
        return [b]
    return [x for y in b for x in _flat(y)]


def _branch_key(b):
    if isinstance(b, int):
        return (1, (b,), "")
    flat = sorted(_flat(b))
    return (len(flat), tuple(flat), _branch_str(b))


def _set_partitions(items: list, k: int) -> Iterator[list[list]]:
    """Set partitions of ``items`` into exactly ``k`` nonempty blocks."""
    if k == 0:
        if not items:
            yield []
        return
    if len(items) < k:
        return
    first, rest = items[0], items[1:]
    # first is alone
    for p in _set_partitions(rest, k - 1):
        yield [[first]] + p
    # first joins an existing block
    for p in _set_partitions(rest, k):
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]


def _rooted_trivalent(block: tuple) -> list[Branch]:
    """All rooted trees hanging off an edge with leaf set ``block``, internal vertices 3-valent."""
    if len(block) == 1:
        return [block[0]]
    out = []
    first, rest = block[0], block[1:]
    for r in range(0, len(rest)):
        for extra in combinations(rest, r):
            a = (first,) + extra
            b = tuple(x for x in rest if x not in extra)
            for ta, tb in product(_rooted_trivalent(a), _rooted_trivalent(b)):
                out.append([ta, tb])
    return out


def enumerate_dim1_strata(n: int) -> list[StableTree]:
    """All one-dimensional boundary strata of M_{0,n}, canonically sorted."""
    if n < 5:
        return []
    out = []
    for blocks in _set_partitions(list(range(1, n + 1)), 4):
        choices = [_rooted_trivalent(tuple(sorted(b))) for b in blocks]
        for branches in product(*choices):
            out.append(StableTree.from_branches(n, list(branches)))
    return sorted(out, key=StableTree.sort_key)


def fpartition_of(t: StableTree) -> FPartition:
    profile = sorted(t.valence(v) for v in range(len(t.vertices)))
    if profile.count(4) != 1 or any(x not in (3, 4) for x in profile):
        raise ValueError(f"{t!r} is not a one-dimensional stratum (valences {profile})")
    return FPartition(t.n, tuple(t.branches_at(t.root())))
