"""Exact rational scalars, infinitesimal-augmented scalars and dense linear algebra.

Everything here works over :class:`fractions.Fraction`; nothing is ever rounded.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce, total_ordering
from math import gcd, lcm
from typing import Iterable, Optional, Sequence

Rational = Fraction


def q(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass an int, Fraction or 'p/q' string")
    return Fraction(x)


def format_q(x) -> str:
    x = q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_q(s: str) -> Fraction:
    return Fraction(s.strip())


@total_ordering
@dataclass(frozen=True)
class EpsRational:
    """``std + eps * e`` with ``e`` a positive formal infinitesimal.

    Ordering is lexicographic on ``(std, eps)``, so ``2 + 7e > 2``.
    """

    std: Fraction
    eps: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "std", q(self.std))
        object.__setattr__(self, "eps", q(self.eps))

    @classmethod
    def of(cls, x) -> "EpsRational":
        if isinstance(x, EpsRational):
            return x
        return cls(q(x), Fraction(0))

    def _key(self):
        return (self.std, self.eps)

    def __add__(self, other):
        other = EpsRational.of(other)
        return EpsRational(self.std + other.std, self.eps + other.eps)

    __radd__ = __add__

    def __neg__(self):
        return EpsRational(-self.std, -self.eps)

    def __sub__(self, other):
        return self + (-EpsRational.of(other))

    def __rsub__(self, other):
        return EpsRational.of(other) - self

    def __mul__(self, k):
        # scaling by a standard rational only; e^2 terms never arise here
        k = q(k)
        return EpsRational(self.std * k, self.eps * k)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, EpsRational)):
            return self._key() == EpsRational.of(other)._key()
        return NotImplemented

    def __hash__(self):
        return hash(self._key())

    def __lt__(self, other):
        if isinstance(other, (int, Fraction, EpsRational)):
            return self._key() < EpsRational.of(other)._key()
        return NotImplemented

    def __str__(self):
        return format_eps(self)

    def __repr__(self):
        return f"EpsRational({format_eps(self)!r})"


def format_eps(x: EpsRational) -> str:
    return f"{format_q(x.std)}+{format_q(x.eps)}*e"


def parse_eps(s: str) -> EpsRational:
    s = s.replace(" ", "")
    if not s.endswith("*e"):
        return EpsRational(parse_q(s))
    body = s[:-2]
    # first sign after the standard part separates it from the eps coefficient
    for i in range(1, len(body)):
        if body[i] in "+-" and body[i - 1] != "/":
            eps = body[i + 1:] if body[i] == "+" else body[i:]
            return EpsRational(parse_q(body[:i]), parse_q(eps))
    return EpsRational(Fraction(0), parse_q(body))


# ---------------------------------------------------------------------------
# vectors


def vec(xs: Iterable) -> tuple[Fraction, ...]:
    return tuple(q(x) for x in xs)


def dot(u: Sequence, v: Sequence) -> Fraction:
    if len(u) != len(v):
        raise ValueError(f"length mismatch {len(u)} != {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def primitive(v: Sequence) -> tuple[int, ...]:
    """Scale ``v`` by a positive rational to a primitive integer vector.

    Direction is preserved; the zero vector maps to itself.
    """
    v = vec(v)
    den = reduce(lcm, (x.denominator for x in v), 1)
    ints = [int(x * den) for x in v]
    g = reduce(gcd, (abs(i) for i in ints), 0)
    if g == 0:
        return tuple(ints)
    return tuple(i // g for i in ints)


def leading_sign(v: Sequence) -> int:
    for x in v:
        if x != 0:
            return 1 if x > 0 else -1
    return 0


def canonical_line(v: Sequence) -> tuple[int, ...]:
    """Primitive integer vector with positive leading entry (for lines, not rays)."""
    p = primitive(v)
    if leading_sign(p) < 0:
        p = tuple(-x for x in p)
    return p


def proportional(u: Sequence, v: Sequence, positive: bool = True) -> bool:
    """True if ``u = c v`` for some rational ``c`` (``c > 0`` when ``positive``)."""
    u, v = vec(u), vec(v)
    if len(u) != len(v):
        return False
    if not any(u) or not any(v):
        return not any(u) and not any(v)
    pu, pv = primitive(u), primitive(v)
    if pu == pv:
        return True
    return not positive and pu == tuple(-x for x in pv)


# ---------------------------------------------------------------------------
# matrices


class QMatrix:
    """Dense rectangular matrix of Fractions. Immutable by convention."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Iterable[Iterable], cols: Optional[int] = None):
        rows = tuple(vec(r) for r in entries)
        if cols is None:
            if not rows:
                raise ValueError("empty matrix needs an explicit column count")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged matrix")
        self.entries = rows
        self.rows = len(rows)
        self.cols = cols

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def zeros(cls, r: int, c: int) -> "QMatrix":
        return cls([[0] * c for _ in range(r)], cols=c)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self.entries)

    @property
    def T(self) -> "QMatrix":
        return QMatrix([self.col(j) for j in range(self.cols)], cols=self.rows)

    def __matmul__(self, other):
        if isinstance(other, QMatrix):
            if self.cols != other.rows:
                raise ValueError("dimension mismatch")
            ot = other.T
            return QMatrix([[dot(r, c) for c in ot.entries] for r in self.entries], cols=other.cols)
        v = vec(other)
        if len(v) != self.cols:
            raise ValueError("dimension mismatch")
        return tuple(dot(r, v) for r in self.entries)

    def __mul__(self, k):
        k = q(k)
        return QMatrix([[k * x for x in r] for r in self.entries], cols=self.cols)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, QMatrix) and self.cols == other.cols and self.entries == other.entries

    def __hash__(self):
        return hash((self.cols, self.entries))

    def __repr__(self):
        body = "; ".join(" ".join(format_q(x) for x in r) for r in self.entries)
        return f"QMatrix({self.rows}x{self.cols}: {body})"

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self.entries]


def as_matrix(A) -> QMatrix:
    return A if isinstance(A, QMatrix) else QMatrix(A)


def rref(A) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns (pivots chosen left to right, top to bottom)."""
    A = as_matrix(A)
    m = [list(r) for r in A.entries]
    pivots: list[int] = []
    r = 0
    for c in range(A.cols):
        p = next((i for i in range(r, A.rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        m[r] = [x / piv for x in m[r]]
        for i in range(A.rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == A.rows:
            break
    return m, pivots


def rank(A) -> int:
    A = as_matrix(A)
    if A.rows == 0 or A.cols == 0:
        return 0
    return len(rref(A)[1])


def solve_linear(A, b: Sequence) -> Optional[tuple[Fraction, ...]]:
    """One exact solution of ``A x = b`` or None when inconsistent.

    Free variables are set to zero, so the answer is deterministic.
    """
    A = as_matrix(A)
    b = vec(b)
    if len(b) != A.rows:
        raise ValueError(f"A has {A.rows} rows but b has {len(b)} entries")
    aug = QMatrix([list(r) + [x] for r, x in zip(A.entries, b)], cols=A.cols + 1)
    m, pivots = rref(aug)
    if A.cols in pivots:
        return None
    x = [Fraction(0)] * A.cols
    for i, c in enumerate(pivots):
        x[c] = m[i][A.cols]
    return tuple(x)


def kernel_basis(A) -> list[tuple[int, ...]]:
    """Basis of the right null space, each vector primitive with positive leading entry."""
    A = as_matrix(A)
    if A.rows == 0:
        return [tuple(1 if i == j else 0 for i in range(A.cols)) for j in range(A.cols)]
    m, pivots = rref(A)
    free = [c for c in range(A.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * A.cols
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -m[i][f]
        basis.append(canonical_line(v))
    return basis


def row_space_basis(A) -> list[tuple[Fraction, ...]]:
    A = as_matrix(A)
    if A.rows == 0:
        return []
    m, pivots = rref(A)
    return [tuple(m[i]) for i in range(len(pivots))]


def det(A) -> Fraction:
    A = as_matrix(A)
    if A.rows != A.cols:
        raise ValueError("determinant of a non-square matrix")
    m = [list(r) for r in A.entries]
    n = A.rows
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            d = -d
        d *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return d
