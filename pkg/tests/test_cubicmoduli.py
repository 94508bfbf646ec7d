from fractions import Fraction

import pytest

from cubiccones import cubicmoduli as cm
from cubiccones.polyhedra import member, v_to_h


def test_lattice_lookup():
    t = cm.standard_lattice("toroidal")
    assert t.vector("T_A1") == (24, -6)
    assert t.vector({"lambda": 24, "T3A2": -6}) == (24, -6)
    assert t.cone_coords("T_R") == (Fraction(25, 4), Fraction(27, 2))
    assert t.from_cone_coords((1, 0)) == (24, -6)
    with pytest.raises(KeyError):
        t.vector("nope")
    with pytest.raises(KeyError):
        cm.standard_lattice("moon")


def test_identities_hold_except_flagged():
    bad = cm.inconsistencies()
    assert [(s, n) for s, n, _, _ in bad] == [("kirwan", "alternative canonical class expansion")]
    _, _, lv, rv = bad[0]
    assert lv == (-90, 20) and rv == (-90, 60)


def test_line_cover():
    cov = cm.line_cover()
    assert cov.degree == 27
    assert cov.pull_class("T_A1") == (2, 0, 1)
    assert cov.pull_class("T3A2") == (0, 1, 0)
    assert cov.push_class("delta2") == (6, 0)
    assert cov.push_class("delta4") == (0, 27)
    assert cov.push_class("delta5") == (15, 0)
    # push pull is multiplication by the degree
    assert cov.composite().entries == ((27, 0), (0, 27))


def test_named_classes_through_cover():
    cov = cm.line_cover()
    line = cm.standard_lattice("line")
    pulled = [Fraction(0)] * 3
    for name, c in cov.named_pull["T_R"]:
        for i, x in enumerate(line.vector(name)):
            pulled[i] += c * x
    assert tuple(pulled) == cov.pull_class("T_R")
    push = {k: dict(v) for k, v in cov.named_push.items()}
    assert push == {"T_R_in": {"T_R": 3}, "T_R_out": {"T_R": 12}}


def test_nef_cones():
    assert cm.nef_cone("toroidal").rays == ((1, 2), (1, 6))
    assert cm.nef_cone("marked").rays == ((1, 1), (1, 3))
    assert cm.hassett_nef_cone() == cm.hassett_nef_cone(computed=False)
    with pytest.raises(KeyError):
        cm.nef_cone("git")


def test_eff_cones():
    assert cm.eff_cone("toroidal").rays == ((0, 1), (1, 0))
    assert cm.eff_cone("marked").rays == ((0, 1), (1, 0))
    assert len(cm.eff_cone("line").rays) == 3


def test_nef_inside_eff():
    for space in ("line", "toroidal", "marked"):
        eff = v_to_h(cm.eff_cone(space))
        assert all(member(eff, r) for r in cm.nef_cone(space).rays)


def test_pullback_of_nef_is_nef():
    cov = cm.line_cover()
    hn = v_to_h(cm.nef_cone("line"))
    for r in cm.nef_cone("toroidal").rays:
        assert member(hn, cov.pull_class(r))
    # just outside the cone the pullback leaves it
    assert not member(hn, cov.pull_class((1, 7)))
    assert not member(hn, cov.pull_class((1, 1)))


def test_slopes():
    k = cm.standard_lattice("kirwan")
    t = cm.standard_lattice("toroidal")
    assert cm.slope(k, "D_A1") == 4 and cm.slope(k, "D_R") == 5
    assert cm.slope(t, "T_R") == Fraction(25, 4) and cm.slope(t, "T_A1") == 4
    with pytest.raises(ZeroDivisionError):
        cm.slope(t, "O1")
    with pytest.raises(ValueError):
        cm.slope(cm.standard_lattice("line"), "gamma")


def test_fourth_powers():
    assert cm.hodge_fourth_power() == Fraction(1, 155520)
    assert cm.weighted_projective_degree([1, 2, 3, 4, 5]) == Fraction(1, 120)
    assert cm.exceptional_fourth_power(Fraction(3, 56), 3, 6) == Fraction(-1, 504)
    assert cm.kirwan_ring().fourth_powers == cm.standard_ring("kirwan").fourth_powers
    assert cm.canonical_fourth_power("toroidal") == Fraction(25589, 216)
    assert cm.canonical_fourth_power("kirwan") == Fraction(52625, 504)
    with pytest.raises(ValueError):
        cm.exceptional_fourth_power(0, 3, 6)


def test_top_intersection_is_quartic():
    ring = cm.standard_ring("toroidal")
    for v in ((1, 0), (2, -3), (Fraction(1, 2), 5)):
        assert cm.top_intersection(ring, tuple(2 * x for x in v)) == 16 * cm.top_intersection(ring, v)


def test_marked_transport():
    assert cm.marked_transport((1, 2)) == (1, 1)
    assert cm.marked_transport((0, 5)) == (0, 1)


def test_format_vector():
    assert cm.format_vector((Fraction(1, 2), -3)) == "(1/2, -3)"
