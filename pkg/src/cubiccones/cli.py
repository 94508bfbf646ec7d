"""Command line driver: ``cubiccones <command> ...``.

Exit codes: 0 success, 1 a verification check failed, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import cubicmoduli as cm
from . import hassett as hs
from .exactq import format_q
from .polyhedra import Polytope, polytope_volume, v_to_h
from .stablegraphs import keel_relation
from .symmetry import (GroupSpec, named_group, orbit_strata, pairing_matrix, push_along_chain,
                       pushforward_relation)


class InputError(Exception):
    pass


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _group(spec: str | None, n: int) -> GroupSpec:
    if spec is None:
        return GroupSpec.trivial(n)
    if spec.endswith(".json") or Path(spec).is_file():
        try:
            g = GroupSpec.from_json(_load_json(spec))
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"bad group file {spec}: {exc}") from None
    else:
        try:
            g = named_group(spec, n)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    if g.n != n:
        raise InputError(f"group acts on {g.n} markings, not {n}")
    return g


def _weights(path: str | None) -> hs.WeightData:
    if path is None:
        return hs.light_heavy_weights()
    try:
        return hs.WeightData.from_json(_load_json(path))
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"bad weight file {path}: {exc}") from None


def _emit(args, data, text: str):
    if getattr(args, "json", False):
        print(json.dumps(data, indent=2))
    else:
        print(text)


def _vec(v) -> list[str]:
    return [format_q(x) for x in v]


# ---------------------------------------------------------------------------


def cmd_keel(args) -> int:
    n = args.n
    idx = (args.i, args.j, args.k, args.l)
    if len(set(idx)) != 4 or not all(1 <= x <= n for x in idx):
        raise InputError(f"need four distinct markings in 1..{n}")
    rel = keel_relation(n, *idx)
    g = _group(args.group, n)
    if g.order > 1:
        if g.name == "S2xS5" and not args.direct:
            rel = push_along_chain(rel, hs.default_chain(g))
        else:
            rel = pushforward_relation(rel, g)
    text = rel.format()
    _emit(args, {"relation": text,
                 "lhs": {str(k): format_q(c) for k, c in rel.lhs.items()},
                 "rhs": {str(k): format_q(c) for k, c in rel.rhs.items()}}, text)
    return 0


def cmd_strata(args) -> int:
    g = _group(args.group, args.n)
    qss = orbit_strata(args.n, g)
    rows = [{"name": s.name, "tree": s.encoding(), "fpartition": s.fclass.to_json(), "orbit_size": len(s.orbit)}
            for s in qss]
    text = "\n".join(f"{r['name']:>4}  {r['tree']:<28} {s.fclass!r}  x{r['orbit_size']}" for r, s in zip(rows, qss))
    _emit(args, rows, text + f"\n{len(qss)} strata")
    return 0


def _setup(args) -> hs.HassettSetup:
    w = _weights(args.weights)
    g = _group(args.group or "S2xS5", w.n)
    if args.weights is None and g.name == "S2xS5":
        return hs.default_setup()
    return hs.HassettSetup.build(w, g)


def cmd_matrix(args) -> int:
    s = _setup(args)
    m = pairing_matrix(s.divisors, s.strata)
    marks = [c in s.contracted for c in s.strata]
    if args.csv:
        from .symmetry import matrix_csv

        sys.stdout.write(matrix_csv(s.divisors, s.strata, marks))
        return 0
    data = {"rows": [d.name for d in s.divisors],
            "columns": [{"tree": c.encoding(), "contracted": k} for c, k in zip(s.strata, marks)],
            "matrix": [_vec(m.row(i)) for i in range(m.rows)]}
    width = max(len(d.name) for d in s.divisors)
    lines = [" " * width + " " + " ".join(f"{j + 1:>3}" for j in range(m.cols)),
             " " * width + " " + " ".join(f"{'*' if k else '':>3}" for k in marks)]
    for i, d in enumerate(s.divisors):
        lines.append(f"{d.name:>{width}} " + " ".join(f"{format_q(x):>3}" for x in m.row(i)))
    lines.append(f"{sum(marks)} of {m.cols} columns contracted (*)")
    _emit(args, data, "\n".join(lines))
    return 0


def cmd_reduce(args) -> int:
    s = _setup(args)
    rows = []
    for d in s.divisors:
        im = s.images[d]
        rows.append({"stratum": d.name, **im.to_json()})
    for c in s.strata:
        im = hs.reduce_stratum(c.representative, s.w)
        rows.append({"stratum": f"{c.name} {c.encoding()}", **im.to_json()})
    text = "\n".join(f"{r['stratum']:<34} {r['image_kind']:<10} {r['image_label']}" for r in rows)
    _emit(args, rows, text)
    return 0


def cmd_pullback(args) -> int:
    s = _setup(args)
    targets = args.targets or s.image_labels()
    out = {}
    for t in targets:
        try:
            cls = hs.pullback_along_h(t, s)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        out[t] = {qd.name: format_q(c) for qd, c in cls.items()}
    text = "\n".join(f"h^* {t} = {hs.format_class(hs.pullback_along_h(t, s))}" for t in targets)
    _emit(args, out, text)
    return 0


def cmd_cones(args) -> int:
    kind = "eff" if args.eff else "nef"
    try:
        cone = cm.eff_cone(args.space) if kind == "eff" else cm.nef_cone(args.space)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None
    lat = cm.standard_lattice(args.space)
    h = v_to_h(cone)
    data = {"space": args.space, "cone": kind, "basis": list(lat.cone_basis),
            "rays": [_vec(r) for r in cone.rays], "facets": [_vec(n) for n in h.normals]}
    lines = [f"{kind} cone of {args.space} in basis ({', '.join(lat.cone_basis)})"]
    lines += ["  ray   " + cm.format_vector(r) for r in cone.rays]
    if args.facets:
        lines += ["  facet " + cm.format_vector(n) + " >= 0" for n in h.normals]
    _emit(args, data, "\n".join(lines))
    return 0


def cmd_ring(args) -> int:
    rows = []
    for space in ("toroidal", "kirwan"):
        lat = cm.standard_lattice(space)
        ring = cm.standard_ring(space) if space == "toroidal" else cm.kirwan_ring()
        for name in lat.classes:
            v = lat.vector(name)
            try:
                s = format_q(cm.slope(lat, name))
            except ZeroDivisionError:
                s = "-"
            rows.append({"space": space, "class": name, "coords": _vec(v), "basis": list(lat.basis),
                         "slope": s, "fourth_power": format_q(cm.top_intersection(ring, v))})
    lines = [f"lambda^4 = {format_q(cm.hodge_fourth_power())}"]
    for space in ("toroidal", "kirwan"):
        ring = cm.standard_ring(space) if space == "toroidal" else cm.kirwan_ring()
        lines.append(f"{space}: {ring.generators[1]}^4 = {format_q(ring.fourth_powers[1])}")
    lines.append(f"{'space':<9} {'class':<6} {'coords':<14} {'slope':<6} fourth power")
    for r in rows:
        lines.append(f"{r['space']:<9} {r['class']:<6} {'(' + ', '.join(r['coords']) + ')':<14} {r['slope']:<6} "
                     f"{r['fourth_power']}")
    _emit(args, {"hodge_fourth_power": format_q(cm.hodge_fourth_power()), "classes": rows}, "\n".join(lines))
    return 0


def cmd_volume(args) -> int:
    data = _load_json(args.file)
    try:
        verts = [tuple(Fraction(str(x)) for x in v) for v in data["vertices"]]
        dim = int(data.get("dim", len(verts[0])))
        p = Polytope(dim, tuple(verts))
    except (KeyError, IndexError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise InputError(f"bad polytope file {args.file}: {exc}") from None
    rep = polytope_volume(p)
    out = {"volume": format_q(rep.euclidean), "normalized_volume": format_q(rep.normalized),
           "full_dimensional": rep.full_dimensional, "vertices": len(p.vertices)}
    text = f"volume {out['volume']}  normalized {out['normalized_volume']}"
    if not rep.full_dimensional:
        text += "  (not full-dimensional)"
    _emit(args, out, text)
    return 0


def cmd_verify(args) -> int:
    from .verify import run_all

    crit = set(args.criterion) if args.criterion else None
    rep = run_all(crit)
    _emit(args, rep.to_json(), "\n".join(rep.lines()))
    return 1 if rep.failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cubiccones", description="Divisor cones on moduli of cubic surfaces, exactly.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.set_defaults(func=fn)
        return sp

    sp = add("keel", cmd_keel, "Keel relation, optionally pushed to a quotient")
    for a in ("n", "i", "j", "k", "l"):
        sp.add_argument(a, type=int)
    sp.add_argument("--group", "--quotient", dest="group", help="S5, S2xS5, trivial or a JSON group file")
    sp.add_argument("--direct", action="store_true", help="push S2xS5 in one step (primitive form)")

    sp = add("strata", cmd_strata, "one-dimensional boundary strata up to symmetry")
    sp.add_argument("n", type=int, nargs="?", default=7)
    sp.add_argument("--group")

    for name, fn, help in (("matrix", cmd_matrix, "divisor/F-curve pairing table"),
                           ("reduce", cmd_reduce, "images under the reduction morphism"),
                           ("pullback", cmd_pullback, "pullbacks of image divisors")):
        sp = add(name, fn, help)
        sp.add_argument("--weights", help="JSON weight file (default: two light, five heavy)")
        sp.add_argument("--group", help="S2xS5 (default), S5, trivial or a JSON group file")
        if name == "matrix":
            sp.add_argument("--csv", action="store_true")
        if name == "pullback":
            sp.add_argument("targets", nargs="*")

    sp = add("cones", cmd_cones, "nef or effective cone of a space")
    sp.add_argument("space", choices=["line", "toroidal", "marked"])
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--nef", action="store_true")
    g.add_argument("--eff", action="store_true")
    sp.add_argument("--facets", action="store_true", help="also print facet normals")

    add("ring", cmd_ring, "top intersection numbers and slopes")

    sp = add("volume", cmd_volume, "exact volume of a polytope from a vertex file")
    sp.add_argument("file")

    sp = add("verify", cmd_verify, "run every reproducibility check")
    sp.add_argument("--criterion", type=int, action="append", help="restrict to one acceptance item (repeatable)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
