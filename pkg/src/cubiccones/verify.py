"""Registry of reproducibility checks, one or more per acceptance item.

Each check returns ``(expected, computed, ok)``; a check registered as ``flag`` turns a
successful detection into status ``flagged`` instead of ``pass``.
"""
from __future__ import annotations

import json
import os
import random
from collections import Counter
from dataclasses import asdict, dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Optional

from . import cubicmoduli as cm
from . import hassett as hs
from .exactq import QMatrix, format_q, primitive, proportional, rank
from .polyhedra import (ConeH, ConeV, Polytope, brute_force_facets, brute_force_rays, h_to_v, member,
                        nonnegative_combination, polytope_volume, v_to_h)
from .stablegraphs import (BoundaryDivisor, all_keel_relations, enumerate_dim1_strata, fpartition_of,
                           keel_relation, pair_divisor_curve)
from .symmetry import S2xS5, S5, orbit_divisors, pairing_matrix, picard_rank, push_along_chain, \
    pushforward_relation

VOLUME_ENV = "CUBICCONES_PA_VERTICES"

# Published 6x24 pairing table: rows Doo_2..Doo_5, Do_2, Do_3; columns in the source's own order.
REFERENCE_MATRIX = (
    (2, 2, -2, 0, 0, 2, -2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (-1, 0, 2, 0, 1, -1, 1, 0, 1, -1, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (0, -1, -1, 0, -1, 0, 2, 1, 0, 2, 2, -1, -1, 0, 0, 0, 1, 1, -1, -1, -1, -1, 0, 0),
    (0, -2, 2, 2, 0, 0, -4, -2, -4, 0, 0, 6, 6, 2, 2, 2, -2, -2, 6, 6, 6, 6, 2, 2),
    (2, 0, 0, 2, 0, 2, 0, 1, -1, 0, 0, 0, 0, 2, -1, 2, 1, -2, 0, 0, 0, 0, 2, -1),
    (0, 2, 0, -1, 1, 0, 0, 0, 2, 0, 0, 0, 0, -1, 1, -1, 0, 2, 0, 0, 0, 0, -1, 1),
)
REFERENCE_CONTRACTED = (1, 4, 6, 14, 16, 23)  # 1-based


@dataclass
class CheckResult:
    name: str
    criterion: int
    anchor: str
    expected: str
    computed: str
    status: str

    def line(self) -> str:
        return f"[{self.status.upper():7}] c{self.criterion:02d} {self.name}: expected {self.expected}; got {self.computed}"


@dataclass
class Check:
    name: str
    criterion: int
    anchor: str
    run: Callable[[], tuple[str, str, bool]]
    flag: bool = False


REGISTRY: list[Check] = []


def check(name: str, criterion: int, anchor: str, flag: bool = False):
    def deco(fn):
        REGISTRY.append(Check(name, criterion, anchor, fn, flag))
        return fn
    return deco


def _vec(v) -> str:
    return "(" + ",".join(format_q(x) for x in v) + ")"


# ---------------------------------------------------------------------------
# 1-2: Keel pushforwards


@check("keel-S5", 1, "Keel relation (1,2,3,4) pushed to the S5 quotient")
def _c1():
    qds = orbit_divisors(7, S5)
    rel = pushforward_relation(keel_relation(7, 1, 2, 3, 4), S5, qds)
    want = (20, 12, 6, 1, -4, -6, -6, -4)
    got = rel.vector(qds)
    return _vec(want), rel.format(), proportional(got, want)


@check("keel-S2xS5", 2, "Keel relation (1,2,3,4) pushed to the S2xS5 quotient")
def _c2():
    qds = orbit_divisors(7, S2xS5)
    rel = pushforward_relation(keel_relation(7, 1, 2, 3, 4), S2xS5, qds)
    want = (20, 24, 12, 2, -8, -12)
    return _vec(want), rel.format(), proportional(rel.vector(qds), want)


@check("keel-S2xS5-through-S5", 2, "same relation pushed in two steps")
def _c2b():
    qds = orbit_divisors(7, S2xS5)
    rel = push_along_chain(keel_relation(7, 1, 2, 3, 4), [S5, S2xS5])
    want = (20, 24, 12, 2, -8, -12)
    got = rel.vector(qds)
    return _vec(want), _vec(got), got == tuple(Fraction(x) for x in want)


# ---------------------------------------------------------------------------
# 3: Picard groups


@check("picard-hassett", 3, "Picard group of the Hassett quotient")
def _c3():
    p = hs.picard_presentation(setup=hs.default_setup())
    want_gens = ("delta2", "delta4", "delta5", "gamma")
    ok = p.generators == want_gens and p.rank == 3 and len(p.relations) == 1
    ok = ok and proportional(p.relations[0].vector(want_gens), (20, 12, 2, -8))
    return ("gens delta2,delta4,delta5,gamma; 20 delta2 + 12 delta4 + 2 delta5 = 8 gamma; rank 3",
            f"gens {','.join(p.generators)}; {'; '.join(p.format())}; rank {p.rank}", ok)


@check("picard-rank-S5", 3, "rank of Pic of M_0,7/S5")
def _c3b():
    r = picard_rank(7, S5)
    return "7", str(r), r == 7


@check("picard-rank-S2xS5", 3, "rank of Pic of M_0,7/(S2xS5)")
def _c3c():
    r = picard_rank(7, S2xS5)
    return "5", str(r), r == 5


@check("picard-rank-after-contraction", 3, "rank 5 minus two contracted divisors")
def _c3d():
    r = hs.picard_rank_after_contraction(hs.default_setup())
    return "3", str(r), r == 3


# ---------------------------------------------------------------------------
# 4-6: strata, matrix, pullbacks


@check("strata-orbits", 4, "one-dimensional boundary strata up to S2xS5")
def _c4():
    n = len(hs.default_setup().strata)
    return "24", str(n), n == 24


@check("contracted-strata", 4, "strata contracted by the reduction morphism")
def _c4b():
    s = hs.default_setup()
    n = len(s.contracted)
    agree = all(hs.light_end_rule(c.representative, s.w) for c in s.contracted)
    agree = agree and not any(hs.light_end_rule(c.representative, s.w) for c in s.strata if c not in s.contracted)
    return "6 (light-end rule agrees)", f"{n} (rule agrees: {agree})", n == 6 and agree


@check("contracted-numerical-classes", 4, "numerical classes among contracted strata")
def _c4c():
    s = hs.default_setup()
    cols = Counter(tuple(hs.quotient_pairing(d, c) for d in s.divisors) for c in s.contracted)
    sizes = sorted(cols.values())
    return "[2, 4]", str(sizes), sizes == [2, 4]


def _matched_columns():
    s = hs.default_setup()
    m = pairing_matrix(s.divisors, s.strata)
    ours = [primitive(m.col(j)) for j in range(m.cols)]
    ref = [primitive(c) for c in zip(*REFERENCE_MATRIX)]
    pool = list(range(len(ours)))
    match = {}
    for i, col in enumerate(ref):
        j = next((j for j in pool if ours[j] == col), None)
        if j is None:
            return s, m, None
        match[i] = j
        pool.remove(j)
    return s, m, match


@check("pairing-matrix", 5, "6x24 table of divisor-curve pairings")
def _c5():
    s, m, match = _matched_columns()
    if match is None:
        return "24/24 columns matched", "unmatched column", False
    exact = all(m.col(j) == tuple(Fraction(x) for x in r) for i, j in match.items()
                for r in [tuple(row[i] for row in REFERENCE_MATRIX)])
    return "24/24 columns matched", f"24/24 matched (exact equality: {exact})", True


@check("pairing-matrix-contracted-columns", 5, "contracted columns of the table")
def _c5b():
    s, m, match = _matched_columns()
    if match is None:
        return "6 contracted", "unmatched", False
    got = sorted(i + 1 for i, j in match.items() if s.strata[j] in s.contracted)
    # numerically equal columns may swap, so compare the column multisets
    ref = Counter(tuple(row[i - 1] for row in REFERENCE_MATRIX) for i in REFERENCE_CONTRACTED)
    ours = Counter(tuple(int(x) for x in m.col(s.strata.index(c))) for c in s.contracted)
    return str(list(REFERENCE_CONTRACTED)), str(got), ref == ours


PULLBACKS = {
    "delta2": {"Doo_2": 1, "Doo_3": 2},
    "delta4": {"Doo_4": 1},
    "delta5": {"Doo_5": 1, "Do_3": 2},
    "gamma": {"Do_2": 1, "Do_3": 2, "Doo_3": 2},
}


def _pullback_check(label):
    def run():
        s = hs.default_setup()
        cls = hs.pullback_along_h(label, s)
        got = {qd.name: c for qd, c in cls.items() if c}
        zero = all(hs.pairing_with(cls, c) == 0 for c in s.contracted)
        want = {k: Fraction(v) for k, v in PULLBACKS[label].items()}
        return (hs.format_class({_Named(k): v for k, v in want.items()}),
                hs.format_class(cls), got == want and zero)
    return run


class _Named(str):
    def sort_key(self):
        fam, i = self.split("_")
        return (0 if fam == "Doo" else 1, int(i))


for _lbl in PULLBACKS:
    check(f"pullback-{_lbl}", 6, f"pullback of {_lbl} along the reduction")(_pullback_check(_lbl))


# ---------------------------------------------------------------------------
# 7-10: cones

NEF_RAYS = ((0, 2, 1), (2, 2, 1), (2, 6, 1), (6, 6, 1))
NEF_FACETS = ((-1, 1, 0), (0, 1, -2), (0, -1, 6), (2, -1, 2))


@check("hassett-nef-rays", 7, "nef cone of the Hassett space from its seven inequalities")
def _c7():
    c = h_to_v(ConeH(3, cm.HASSETT_NEF_INEQUALITIES))
    return str(list(NEF_RAYS)), str(list(c.rays)), c.rays == NEF_RAYS and c.is_pointed


@check("hassett-nef-derived", 7, "same cone with inequalities derived from F-curve pairings")
def _c7b():
    derived = hs.nef_inequalities(hs.default_setup())
    same = set(derived) == set(cm.HASSETT_NEF_INEQUALITIES)
    c = cm.hassett_nef_cone(computed=True)
    return "7 inequalities, same rays", f"{len(derived)} inequalities (identical set: {same}), rays {list(c.rays)}", \
        same and c.rays == NEF_RAYS


@check("hassett-nef-facets", 7, "facets of the nef cone")
def _c7c():
    h = v_to_h(ConeV(3, NEF_RAYS))
    return str(sorted(NEF_FACETS)), str(list(h.normals)), h.normals == tuple(sorted(NEF_FACETS)) and not h.equations


@check("hassett-eff", 8, "effective cone of the Hassett space")
def _c8():
    lat = cm.standard_lattice("line")
    eff = cm.eff_cone("line")
    gamma = lat.vector("gamma")
    lam = nonnegative_combination(eff.rays, gamma)
    coeffs = dict(zip(eff.rays, lam)) if lam else {}
    got = tuple(coeffs.get(r, 0) for r in ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    # gamma from the Picard relation, not the table
    p = hs.picard_presentation(setup=hs.default_setup())
    v = p.relations[0].vector(p.generators)
    from_rel = tuple(-x / v[3] for x in v[:3])
    want = (Fraction(5, 2), Fraction(3, 2), Fraction(1, 4))
    ok = got == want and from_rel == want and all(x > 0 for x in got) and not member(eff, (-1, 0, 0))
    return f"rays delta2,delta4,delta5; gamma = {_vec(want)}", f"rays {list(eff.rays)}; gamma = {_vec(got)}", ok


@check("toroidal-nef", 9, "nef cone of the toroidal compactification by pullback membership")
def _c9():
    c = cm.nef_cone("toroidal")
    return "[(1, 2), (1, 6)]", str(list(c.rays)), c.rays == ((1, 2), (1, 6))


@check("toroidal-nef-boundary", 9, "pullbacks just outside the nef cone")
def _c9b():
    cov = cm.line_cover()
    nef = cm.hassett_nef_cone()
    res = {b: member(nef, cov.pull_class((1, b))) for b in (Fraction(3, 2), Fraction(13, 2), 2, 6)}
    got = ", ".join(f"{format_q(b)}:{v}" for b, v in res.items())
    return "3/2:False, 13/2:False, 2:True, 6:True", got, res == {Fraction(3, 2): False, Fraction(13, 2): False,
                                                               2: True, 6: True}


@check("toroidal-eff", 9, "effective cone of the toroidal compactification")
def _c9c():
    c = cm.eff_cone("toroidal")
    cov = cm.line_cover()
    lam = nonnegative_combination(cm.eff_cone("line").rays, cov.pull_class("T_A1"))
    no_delta4 = lam is not None and lam[1] == 0
    return "[(0, 1), (1, 0)]; T_A1 pulls back without delta4", f"{list(c.rays)}; {no_delta4}", \
        c.rays == ((0, 1), (1, 0)) and no_delta4


@check("marked-nef", 10, "invariant nef cone of the marked space")
def _c10():
    c = cm.nef_cone("marked")
    return "[(1, 1), (1, 3)]", str(list(c.rays)), c.rays == ((1, 1), (1, 3))


@check("marked-eff", 10, "invariant effective cone of the marked space")
def _c10b():
    c = cm.eff_cone("marked")
    return "[(0, 1), (1, 0)]", str(list(c.rays)), c.rays == ((0, 1), (1, 0))


# ---------------------------------------------------------------------------
# 11: cover arithmetic


@check("cover-degree", 11, "push after pull on the toroidal lattice")
def _c11():
    m = cm.line_cover().composite()
    return "27 * identity", repr(m), m == QMatrix.identity(2) * 27


@check("cover-eckardt", 11, "push after pull of the Eckardt class")
def _c11b():
    cov = cm.line_cover()
    lat = cm.standard_lattice("toroidal")
    pulled = dict(cov.named_pull["T_R"])
    total = sum((c * dict(cov.named_push[k])["T_R"] for k, c in pulled.items()), Fraction(0))
    # the named split must agree with the linear pullback
    line = cm.standard_lattice("line")
    split = tuple(sum(c * x for c, x in zip((pulled["T_R_in"], pulled["T_R_out"]), col))
                  for col in zip(line.vector("T_R_in"), line.vector("T_R_out")))
    ok = total == 27 and split == cov.pull_class("T_R")
    ok = ok and all(cov.push_class(k) == tuple(c * x for x in lat.cone_coords("T_R"))
                    for k, c in ((k, dict(v)["T_R"]) for k, v in cov.named_push.items()))
    return "27 (= 3 + 2*12)", format_q(total), ok


@check("cover-relation", 11, "pushforward of the Hassett Picard relation")
def _c11c():
    cov = cm.line_cover()
    tor = cm.standard_lattice("toroidal")
    lhs = cov.push_class({"delta2": 20, "delta4": 12, "delta5": 2})
    line = cm.standard_lattice("line")
    rhs = tuple(8 * dict(cov.named_push["T_R_in"])["T_R"] * x for x in tor.cone_coords("T_R"))
    ok = lhs == (150, 324) and rhs == lhs and line.vector("gamma") == line.vector("T_R_in")
    tr = {ident.name: okk for ident, okk, *_ in tor.check_identities()}
    ok = ok and tr["Eckardt divisor against the cone basis"] and tuple(3 * x for x in (50, 108)) == lhs
    return "150 T_A1 + 324 T3A2 = 24 T_R = 3*(50 T_A1 + 108 T3A2)", f"{_vec(lhs)} = {_vec(rhs)}", ok


@check("toroidal-identities", 11, "8 T_R and -4K against the cone basis")
def _c11d():
    tor = cm.standard_lattice("toroidal")
    tr = tor.cone_coords("T_R")
    k = tor.cone_coords("K")
    got8 = tuple(8 * x for x in tr)
    gotk = tuple(-4 * x for x in k)
    return "8T_R=(50,108); -4K=(15,26)", f"8T_R={_vec(got8)}; -4K={_vec(gotk)}", got8 == (50, 108) and gotk == (15, 26)


@check("slopes", 11, "slopes of discriminant and Eckardt classes")
def _c11e():
    kir = cm.standard_lattice("kirwan")
    tor = cm.standard_lattice("toroidal")
    got = (cm.slope(kir, "D_A1"), cm.slope(kir, "D_R"), cm.slope(tor, "T_R"), cm.slope(tor, "T_A1"))
    want = (4, 5, Fraction(25, 4), 4)
    return _vec(want), _vec(got), got == want


# ---------------------------------------------------------------------------
# 12-13: intersection numbers


@check("hodge-fourth-power", 12, "lambda^4 from the weighted projective space")
def _c12():
    v = cm.hodge_fourth_power()
    ok = v == Fraction(1, 155520) and all(r.fourth_powers[0] == v for r in map(cm.standard_ring, ("toroidal", "kirwan")))
    return "1/155520", format_q(v), ok


def _volume() -> tuple[Fraction, str]:
    path = os.environ.get(VOLUME_ENV)
    if not path:
        return Fraction(3, 56), "given"
    with open(path) as fh:
        data = json.load(fh)
    p = Polytope(len(data["vertices"][0]), tuple(tuple(Fraction(x) for x in v) for v in data["vertices"]))
    return polytope_volume(p).euclidean, "from vertex file"


@check("exceptional-fourth-power", 12, "fourth power of the Kirwan exceptional divisor")
def _c12b():
    vol, how = _volume()
    d4 = cm.exceptional_fourth_power(vol, 3, 6)
    return "-1/504 (volume 3/56)", f"{format_q(d4)} (volume {format_q(vol)} {how})", \
        d4 == Fraction(-1, 504) and vol == Fraction(3, 56)


@check("canonical-fourth-power-toroidal", 12, "K^4 on the toroidal compactification")
def _c12c():
    v = cm.canonical_fourth_power("toroidal")
    want = Fraction(3375, 8) - Fraction(8192, 27)
    return "3375/8 - 8192/27", format_q(v), v == want


@check("canonical-fourth-power-kirwan", 12, "K^4 on the Kirwan blowup")
def _c12d():
    vol, _ = _volume()
    v = cm.canonical_fourth_power("kirwan", cm.kirwan_ring(vol))
    want = Fraction(3375, 8) - Fraction(20000, 63)
    return "3375/8 - 20000/63", format_q(v), v == want


@check("canonical-fourth-powers-differ", 12, "the two compactifications are not K-equivalent")
def _c12e():
    a = cm.canonical_fourth_power("toroidal")
    b = cm.canonical_fourth_power("kirwan", cm.kirwan_ring())
    return "unequal", f"{format_q(a)} vs {format_q(b)}", a != b


@check("kirwan-canonical-expansion", 13, "two expansions of the Kirwan canonical class", flag=True)
def _c13():
    bad = cm.inconsistencies()
    kir = [b for b in bad if b[0] == "kirwan"]
    detected = len(bad) == 1 and len(kir) == 1
    got = "; ".join(f"{sp}: {name}: {_vec(lv)} vs {_vec(rv)}" for sp, name, lv, rv in bad) or "none"
    return "detected: (-90,20) vs (-90,60) on (lambda,D3A2)", got, detected and kir[0][3] == (-90, 60)


# ---------------------------------------------------------------------------
# 14: property suites (deterministic samples)


def _raw_pairing(T: frozenset, f) -> int:
    inside = [b for b in f.blocks if b <= T]
    if sum(len(b) for b in inside) != len(T):
        return 0
    return 1 if len(inside) == 2 else -1


@check("complement-invariance", 14, "pairing depends on D_T only through {T, T^c}")
def _c14a():
    bad = 0
    n = 6
    full = frozenset(range(1, n + 1))
    fs = {fpartition_of(t) for t in enumerate_dim1_strata(n)}
    for k in range(2, n - 1):
        for T in combinations(range(1, n + 1), k):
            T = frozenset(T)
            d = BoundaryDivisor(n, T)
            for f in fs:
                a = pair_divisor_curve(d, f)
                if not (a == _raw_pairing(T, f) == _raw_pairing(full - T, f)):
                    bad += 1
    return "0 violations", f"{bad} violations", bad == 0


@check("keel-annihilates-curves", 14, "Keel relations pair to zero with every F-curve, n = 5, 6, 7")
def _c14b():
    bad = 0
    total = 0
    for n in (5, 6, 7):
        fs = sorted({fpartition_of(t) for t in enumerate_dim1_strata(n)}, key=lambda f: f.sort_key())
        for rel in all_keel_relations(n):
            diff = rel.difference()
            for f in fs:
                total += 1
                if sum(c * pair_divisor_curve(d, f) for d, c in diff.items()) != 0:
                    bad += 1
    return "0 nonzero pairings", f"{bad} nonzero of {total}", bad == 0


def random_pointed_cone(rng: random.Random, d: int) -> list[tuple[int, ...]]:
    """Random full-dimensional pointed cone: generators with positive first coordinate."""
    while True:
        k = rng.randint(d, d + 2)
        rays = [tuple([rng.randint(1, 4)] + [rng.randint(-4, 4) for _ in range(d - 1)]) for _ in range(k)]
        if rank(QMatrix(rays, cols=d)) == d:
            return rays


@check("double-description-round-trip", 14, "100 random pointed cones in dimensions 2-5")
def _c14c():
    rng = random.Random(20240611)
    bad = 0
    for i in range(100):
        d = 2 + i % 4
        gens = random_pointed_cone(rng, d)
        h = v_to_h(ConeV(d, gens))
        v = h_to_v(h)
        ok = h.normals == brute_force_facets(gens) and v.rays == brute_force_rays(h)
        ok = ok and set(v.rays) <= {primitive(g) for g in gens} and v_to_h(v) == h
        bad += not ok
    return "0 mismatches", f"{bad} mismatches", bad == 0


@check("reduction-idempotent", 14, "reducing a reduced curve changes nothing")
def _c14d():
    s = hs.default_setup()
    bad = 0
    for c in s.strata:
        once, _ = hs.reduce_curve(hs.WeightedCurve.of_tree(c.representative), s.w)
        twice, steps = hs.reduce_curve(once, s.w)
        bad += (twice != once) or bool(steps)
    return "0 changes on 24 strata", f"{bad} changes", bad == 0


# ---------------------------------------------------------------------------


@dataclass
class VerificationReport:
    checks: list

    @property
    def failed(self) -> bool:
        return any(c.status == "fail" for c in self.checks)

    def to_json(self) -> dict:
        return {"checks": [asdict(c) for c in self.checks],
                "summary": dict(Counter(c.status for c in self.checks))}

    def lines(self) -> list[str]:
        out = [c.line() for c in self.checks]
        summ = Counter(c.status for c in self.checks)
        out.append(f"{len(self.checks)} checks: {summ.get('pass', 0)} pass, {summ.get('fail', 0)} fail, "
                   f"{summ.get('flagged', 0)} flagged")
        return out


def run_check(c: Check) -> CheckResult:
    try:
        expected, computed, ok = c.run()
    except Exception as exc:  # a crash is a failure, not an abort of the whole report
        return CheckResult(c.name, c.criterion, c.anchor, "-", f"error: {exc!r}", "fail")
    status = ("flagged" if c.flag else "pass") if ok else "fail"
    return CheckResult(c.name, c.criterion, c.anchor, expected, computed, status)


def run_all(criteria: Optional[set] = None) -> VerificationReport:
    return VerificationReport([run_check(c) for c in REGISTRY if criteria is None or c.criterion in criteria])
