from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cubiccones import hassett as hs
from cubiccones.exactq import EpsRational
from cubiccones.stablegraphs import BoundaryDivisor, StableTree, enumerate_dim1_strata
from cubiccones.symmetry import GroupSpec, quotient_pairing

W = hs.light_heavy_weights()
TREES = enumerate_dim1_strata(7)


@pytest.fixture(scope="module")
def setup():
    return hs.default_setup()


def test_weights():
    assert W.total() == EpsRational(2, 7)
    assert W.light() == frozenset({1, 2})
    assert hs.WeightData.from_json(W.to_json()) == W
    assert hs.WeightData.from_json({"weights": ["1/6+1*e"] * 2 + ["1/3+1*e"] * 5}) == W
    with pytest.raises(ValueError):
        hs.WeightData((Fraction(1, 3),) * 6)  # total exactly 2
    with pytest.raises(ValueError):
        hs.WeightData((Fraction(3, 2), 1, 1))


@pytest.mark.parametrize("i,stable", [(2, False), (3, False), (4, True), (5, True)])
def test_component_with_both_light_points(i, stable):
    legs = [1, 2] + list(range(3, i + 1))
    assert W.total(legs) + 1 == EpsRational(Fraction(i + 2, 3), i)
    assert hs.component_stable(legs, 1, W) is stable


def test_whole_curve_stable():
    assert hs.component_stable(range(1, 8), 0, W)


@pytest.mark.parametrize("side,kind,label", [
    ({1, 2}, "divisor", "delta2"),
    ({1, 2, 3}, "codim-two", ""),
    ({1, 2, 3, 4}, "divisor", "delta4"),
    ({1, 2, 3, 4, 5}, "divisor", "delta5"),
    ({1, 3}, "divisor", "gamma"),
    ({1, 3, 4}, "codim-two", ""),
    ({1, 3, 4, 5}, "codim-two", ""),  # complement {2,6,7} collapses
])
def test_divisor_images(side, kind, label):
    im = hs.reduce_stratum(BoundaryDivisor(7, side), W)
    assert (im.kind, im.label) == (kind, label)


def test_codim_two_means_three_markings_collide():
    for d in hs.default_setup().divisors:
        im = hs.reduce_stratum(d, W)
        _, contracted = hs.reduce_curve(hs.WeightedCurve.of_tree(StableTree.of_divisor(d.representative)), W)
        big = any(len(c) >= 3 for c in contracted)
        assert (im.kind == "codim-two") == big


def test_contracted_strata(setup):
    assert len(setup.strata) == 24
    assert len(setup.contracted) == 6
    sizes = Counter(tuple(quotient_pairing(d, c) for d in setup.divisors) for c in setup.contracted)
    assert sorted(sizes.values()) == [2, 4]


def test_light_end_rule_everywhere():
    for t in TREES:
        assert hs.is_contracted(t, W) == hs.light_end_rule(t, W)


def test_chain_with_light_end_contracted():
    t = StableTree.from_branches(7, [1, 2, 3, [4, [5, [6, 7]]]])
    assert hs.is_contracted(t, W)
    assert hs.reduce_stratum(t, W).kind == "point"


def test_dm_weights_contract_nothing():
    w = hs.dm_weights(7)
    assert not any(hs.is_contracted(t, w) for t in TREES)
    assert all(hs.reduce_stratum(t, w).dim == 1 for t in TREES[:50])


@given(st.sampled_from(TREES))
@settings(max_examples=80, deadline=None)
def test_reduction_idempotent(t):
    once, _ = hs.reduce_curve(hs.WeightedCurve.of_tree(t), W)
    twice, steps = hs.reduce_curve(once, W)
    assert twice == once and steps == []


@given(st.permutations([3, 4, 5, 6, 7]), st.sampled_from(TREES))
@settings(max_examples=40, deadline=None)
def test_reduction_respects_symmetry(perm, t):
    p = {1: 1, 2: 2, **dict(zip([3, 4, 5, 6, 7], perm))}
    a, b = hs.reduce_stratum(t, W), hs.reduce_stratum(t.permuted(p), W)
    assert (a.kind, a.label, a.dim) == (b.kind, b.label, b.dim)


EXPECTED = {
    "delta2": {"Doo_2": 1, "Doo_3": 2},
    "delta4": {"Doo_4": 1},
    "delta5": {"Doo_5": 1, "Do_3": 2},
    "gamma": {"Do_2": 1, "Do_3": 2, "Doo_3": 2},
}


@pytest.mark.parametrize("label", sorted(EXPECTED))
def test_pullbacks(setup, label):
    cls = hs.pullback_along_h(label, setup)
    assert {d.name: c for d, c in cls.items()} == EXPECTED[label]
    for c in setup.contracted:
        assert hs.pairing_with(cls, c) == 0


def test_pullback_of_unknown_label(setup):
    with pytest.raises(ValueError):
        hs.pullback_along_h("delta3", setup)


def test_picard_presentation(setup):
    p = hs.picard_presentation(setup=setup)
    assert p.generators == ("delta2", "delta4", "delta5", "gamma")
    assert p.format() == ["20 delta2 + 12 delta4 + 2 delta5 = 8 gamma"]
    assert p.rank == 3
    assert hs.picard_rank_after_contraction(setup) == 3


def test_relation_transport_from_pullbacks(setup):
    # pulling back the relation must give a relation upstairs: it kills every curve
    lhs = {}
    for lbl, c in (("delta2", 20), ("delta4", 12), ("delta5", 2), ("gamma", -8)):
        for d, a in hs.pullback_along_h(lbl, setup).items():
            lhs[d] = lhs.get(d, 0) + c * a
    assert all(hs.pairing_with(lhs, s) == 0 for s in setup.strata)


def test_nef_inequalities(setup):
    assert set(hs.nef_inequalities(setup)) == {(2, -1, 2), (0, 1, -2), (1, 0, 0), (-1, 1, 0), (0, -1, 6),
                                               (0, 0, 1), (0, 1, 2)}


def test_other_group_labels():
    s = hs.HassettSetup.build(W, GroupSpec.trivial(7))
    assert len(s.strata) == 1260
    assert len(s.contracted) == sum(hs.light_end_rule(t, W) for t in TREES)
