from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, settings, strategies as st

from cubiccones.exactq import (EpsRational, QMatrix, canonical_line, det, format_eps, format_q, kernel_basis,
                               parse_eps, parse_q, primitive, proportional, rank, solve_linear)

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=30)
small = st.integers(min_value=-6, max_value=6)


def matrices(rows=st.integers(1, 4), cols=st.integers(1, 4)):
    return st.tuples(rows, cols).flatmap(
        lambda rc: st.lists(st.lists(small, min_size=rc[1], max_size=rc[1]), min_size=rc[0], max_size=rc[0]))


def test_format_q():
    assert format_q(Fraction(3, 56)) == "3/56"
    assert format_q(Fraction(-4, 2)) == "-2"
    with pytest.raises(TypeError):
        format_q(0.5)


@given(fractions)
def test_q_round_trip(x):
    assert parse_q(format_q(x)) == x


@given(fractions, fractions)
def test_eps_round_trip(a, b):
    x = EpsRational(a, b)
    assert parse_eps(format_eps(x)) == x


def test_eps_examples():
    assert parse_eps("1/6+1*e") == EpsRational(Fraction(1, 6), 1)
    assert parse_eps("-1/3+-2*e") == EpsRational(Fraction(-1, 3), -2)
    assert parse_eps("5/2") == EpsRational(Fraction(5, 2))
    assert EpsRational(2, 7) > 2
    assert EpsRational(Fraction(5, 3), 3) + 0 < 2


@given(fractions, fractions, fractions, fractions)
def test_eps_order_matches_small_epsilon(a, b, c, d):
    # for a tiny concrete epsilon the lexicographic order agrees with real arithmetic
    x, y = EpsRational(a, b), EpsRational(c, d)
    if x == y:
        return
    eps = Fraction(1, 10 ** 9)
    assert (x < y) == (a + b * eps < c + d * eps)


@given(fractions, fractions, fractions, fractions)
def test_eps_addition(a, b, c, d):
    s = EpsRational(a, b) + EpsRational(c, d)
    assert s == EpsRational(a + c, b + d)
    assert s - EpsRational(c, d) == EpsRational(a, b)


def test_primitive():
    assert primitive([Fraction(1, 2), Fraction(-3, 4)]) == (2, -3)
    assert primitive([0, -6, 4]) == (0, -3, 2)
    assert canonical_line([0, -6, 4]) == (0, 3, -2)
    assert primitive([0, 0]) == (0, 0)
    assert proportional((2, 4), (1, 2)) and not proportional((2, 4), (-1, -2))
    assert proportional((2, 4), (-1, -2), positive=False)


@given(matrices())
def test_kernel_is_kernel(A):
    M = QMatrix(A)
    ker = kernel_basis(M)
    assert len(ker) == M.cols - rank(M)
    for k in ker:
        assert all(x == 0 for x in M @ k)


@given(matrices(), st.data())
def test_solve_linear(A, data):
    M = QMatrix(A)
    x = data.draw(st.lists(small, min_size=M.cols, max_size=M.cols))
    b = M @ x
    sol = solve_linear(M, b)
    assert sol is not None and M @ sol == b


def test_solve_inconsistent():
    assert solve_linear([[1, 1], [2, 2]], [1, 3]) is None
    with pytest.raises(ValueError):
        solve_linear([[1, 1]], [1, 2])


def _leibniz(A):
    n = len(A)
    total = Fraction(0)
    for p in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        term = Fraction(-1) ** inv
        for i in range(n):
            term *= A[i][p[i]]
        total += term
    return total


@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
@settings(max_examples=60)
def test_det_against_leibniz(A):
    assert det(A) == _leibniz(A)


def test_matrix_ops():
    A = QMatrix([[1, 2], [3, 4]])
    assert (A @ QMatrix.identity(2)) == A
    assert A.T.entries == ((1, 3), (2, 4))
    assert (2 * A)[1, 1] == 8
    assert det(A) == -2
