import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from cubiccones.polyhedra import (ConeH, ConeV, Polytope, brute_force_facets, brute_force_rays, clip, dual, facets,
                                  h_to_v, member, minimal, nonnegative_combination, polytope_volume, preimage,
                                  triangulate, v_to_h)
from cubiccones.exactq import QMatrix
from cubiccones.verify import random_pointed_cone


def test_orthant():
    c = h_to_v(ConeH(3, ((1, 0, 0), (0, 1, 0), (0, 0, 1))))
    assert c.rays == ((0, 0, 1), (0, 1, 0), (1, 0, 0)) and c.is_pointed


def test_square_cone():
    rays = ((1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1))
    h = v_to_h(ConeV(3, rays))
    assert set(h.normals) == {(1, 1, 1), (1, -1, 1), (-1, 1, 1), (-1, -1, 1)}
    assert set(h_to_v(h).rays) == set(rays)


def test_redundant_generators_dropped():
    c = minimal(ConeV(2, ((1, 0), (0, 1), (1, 1), (2, 2))))
    assert c.rays == ((0, 1), (1, 0))


def test_lineality():
    c = h_to_v(ConeH(3, ((1, 0, 0),)))
    assert c.rays == ((1, 0, 0),)
    assert len(c.lineality) == 2 and not c.is_pointed
    h = v_to_h(ConeV(3, ((1, 0, 0),), ((0, 1, 0), (0, 0, 1))))
    assert h.normals == ((1, 0, 0),) and h.equations == ()


def test_single_ray_in_plane():
    h = v_to_h(ConeV(2, ((1, 0),)))
    assert h.normals == ((1, 0),)
    assert h.equations == ((0, 1),)


def test_equations_cut_down():
    c = h_to_v(ConeH(3, ((1, 0, 0), (0, 1, 0)), ((1, -1, 0),)))
    assert c.rays == ((1, 1, 0),)
    assert c.lineality == ((0, 0, 1),)


def test_whole_space_and_origin():
    assert h_to_v(ConeH(2)).lineality == ((0, 1), (1, 0))
    origin = v_to_h(ConeV(2))
    assert len(origin.equations) == 2
    assert member(origin, (0, 0)) and not member(origin, (1, 0))


def test_bad_length():
    with pytest.raises(ValueError):
        ConeH(2, ((1, 0, 0),))
    with pytest.raises(ValueError):
        member(ConeV(2, ((1, 0),)), (1, 0, 0))


def test_rays_keep_sign():
    assert ConeV(2, ((-2, -4),)).rays == ((-1, -2),)


@pytest.mark.parametrize("seed", range(100))
def test_random_round_trip_against_brute_force(seed):
    rng = random.Random(seed)
    d = 2 + seed % 4
    gens = random_pointed_cone(rng, d)
    want_rays = brute_force_rays(ConeH(d, brute_force_facets(gens)))
    h = v_to_h(ConeV(d, tuple(gens)))
    assert h.normals == brute_force_facets(gens)
    v = h_to_v(h)
    assert v.rays == want_rays and v.is_pointed
    assert v_to_h(v) == h


vecs3 = st.tuples(*[st.integers(-4, 4)] * 3)


@given(st.lists(vecs3, min_size=1, max_size=5), vecs3)
@settings(max_examples=60, deadline=None)
def test_member_agrees_between_forms(gens, x):
    c = ConeV(3, tuple(gens))
    assert member(c, x) == member(v_to_h(c), x)


@given(st.lists(vecs3, min_size=1, max_size=5))
@settings(max_examples=40, deadline=None)
def test_double_dual(gens):
    c = v_to_h(ConeV(3, tuple(gens)))
    assert dual(v_to_h(dual(c))) == h_to_v(c)


def test_nonnegative_combination():
    lam = nonnegative_combination([(1, 0), (0, 1), (1, 1)], (2, 3))
    assert lam is not None and all(l >= 0 for l in lam)
    assert nonnegative_combination([(1, 0), (1, 1)], (0, 1)) is None


def test_preimage():
    M = QMatrix([[1, 1], [1, -1]])
    c = preimage(ConeH(2, ((1, 0), (0, 1))), M)
    assert set(h_to_v(c).rays) == {(1, 1), (1, -1)}


def _box(lo, hi, d):
    return Polytope(d, tuple(product(*[(Fraction(lo), Fraction(hi))] * d)))


def test_unit_cube_and_simplex():
    cube = _box(0, 1, 3)
    assert polytope_volume(cube).euclidean == 1
    assert len(facets(cube)) == 6
    assert len(triangulate(cube)) == 6
    simplex = Polytope(3, ((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)))
    rep = polytope_volume(simplex)
    assert rep.euclidean == Fraction(1, 6) and rep.normalized == 1


def test_interior_points_dropped():
    p = Polytope(2, ((0, 0), (2, 0), (0, 2), (1, Fraction(1, 2))))
    assert len(p.vertices) == 3
    assert polytope_volume(p).euclidean == 2


def test_degenerate_polytope_flagged():
    p = Polytope(3, ((0, 0, 0), (1, 0, 0), (0, 1, 0)))
    rep = polytope_volume(p)
    assert not rep.full_dimensional and rep.euclidean == 0


@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)), min_size=4, max_size=8),
       st.tuples(st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2)).filter(any), st.integers(-2, 2))
@settings(max_examples=30, deadline=None)
def test_volume_additive_under_cuts(pts, n, b):
    p = Polytope(3, tuple(pts))
    if p.affine_dimension() < 3:
        return
    up = clip(p, n, b)
    down = clip(p, tuple(-x for x in n), -b)
    vol = lambda q: polytope_volume(q).euclidean if q.vertices else 0
    assert vol(up) + vol(down) == vol(p)


@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=3, max_size=7),
       st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_volume_scales(pts, k):
    p = Polytope(2, tuple(pts))
    big = Polytope(2, tuple(tuple(k * x for x in v) for v in pts))
    assert polytope_volume(big).euclidean == k ** 2 * polytope_volume(p).euclidean
