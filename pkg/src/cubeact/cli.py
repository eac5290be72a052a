"""Command-line interface.

Exit codes: 0 when the verdict holds (or the command simply succeeded), 1 when
the verdict fails or violations are found, 2 for usage and input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import actions, artin, bridges, complex as cx, fixtures, formats, hyperplanes as hp
from .errors import CubeActError

OK, FAIL, ERROR = 0, 1, 2


class Result:
    """What a subcommand produced: exit code, JSON-ready payload, optional raw text."""

    def __init__(self, code, payload=None, raw=None, lines=None):
        self.code = code
        self.payload = payload
        self.raw = raw  # emitted verbatim in both formats
        self.lines = lines  # JSON-lines output (one record per line)


def _text(obj, indent=0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        out = []
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and any(isinstance(x, (dict, list)) for x in
                                                         (v.values() if isinstance(v, dict) else v)):
                out.append(f"{pad}{k}:")
                out.append(_text(v, indent + 1))
            else:
                out.append(f"{pad}{k}: {_flat(v)}")
        return "\n".join(out)
    if isinstance(obj, list):
        out = []
        for x in obj:
            if isinstance(x, dict) and x:
                # bullet the first line so consecutive records stay apart
                body = _text(x, indent + 1)
                out.append(f"{pad}- " + body[len(pad) + 2:])
            elif isinstance(x, list):
                out.append(_text(x, indent))
            else:
                out.append(f"{pad}- {_flat(x)}")
        return "\n".join(out)
    return f"{pad}{_flat(obj)}"


def _flat(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_flat(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_flat(v[k])}" for k in sorted(v)) + "}"
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, str) and any(c in v for c in ", []"):
        return repr(v)
    return str(v)


def _pair(values):
    return int(values[0]), int(values[1])


# -- handlers ---------------------------------------------------------------------------


def cmd_validate(a):
    X = formats.load_complex(a.file)
    v = cx.is_median_graph(X)
    payload = {"median": v.is_median, "vertices": X.n, "edges": len(X.edges)}
    if not v.is_median:
        payload.update(witness=list(v.witness), witness_medians=v.witness_medians, reason=v.reason)
    return Result(OK if v else FAIL, payload)


def cmd_hyperplanes(a):
    X = formats.load_complex(a.file)
    out = []
    for h in hp.hyperplanes(X):
        depth = hp.halfspace_depth(X, h.id)
        out.append({"id": h.id, "edges": len(h.edge_class),
                    "side_a": sorted(h.side_a, key=cx.vertex_key),
                    "side_b": sorted(h.side_b, key=cx.vertex_key),
                    "depth": [depth.depth_a, depth.depth_b]})
    return Result(OK, {"hyperplanes": out, "boundary_affected": X.has_window})


def cmd_classify(a):
    X = formats.load_complex(a.file)
    if a.pair:
        return Result(OK, hp.classify_pair(X, *_pair(a.pair)).as_dict())
    return Result(OK, {"pairs": [p.as_dict() for p in hp.classify_all(X)]})


def cmd_crossing(a):
    X = formats.load_complex(a.file)
    cg = hp.crossing_graph(X)
    return Result(OK, {"nodes": list(cg.nodes), "edges": [list(e) for e in sorted(cg.adjacency)]})


def cmd_bridge(a):
    X = formats.load_complex(a.file)
    return Result(OK, bridges.bridge(X, *_pair(a.pair)).as_dict())


def cmd_bridge_check(a):
    X = formats.load_complex(a.file)
    h1, h2 = _pair(a.pair)
    gate = bridges.check_gate_formula(X, h1, h2)
    payload = gate.as_dict()
    payload["checks"] = {"gate_formula": len(gate.violations)}
    bad = list(gate.violations)
    if gate.relation == hp.UBER_SEPARATED:
        cut = bridges.check_bridge_cut(X, h1, h2)
        payload["checks"]["bridge_cut"] = len(cut.violations)
        bad += cut.violations
    payload["violations"] = [list(v) for v in bad]
    return Result(FAIL if bad else OK, payload)


def cmd_sectors(a):
    X = formats.load_complex(a.file)
    if a.cube is not None:
        family = sorted(hp._cube(X, a.cube).theta_classes)
    elif a.family:
        family = [int(h) for h in a.family]
    else:
        raise argparse.ArgumentTypeError("give --family or --cube")
    s = hp.sectors(X, family)
    rows = []
    for sig in sorted(s.signatures):
        rows.append({"signature": "".join(map(str, sig)), "size": len(s.signatures[sig]),
                     "hyperplanes": list(s.contained_hyperplanes[sig]),
                     "boundary_affected": s.boundary_affected[sig]})
    return Result(OK, {"family": list(s.family), "sectors": rows,
                       "bearing": len(s.bearing()), "singletons": len(s.singletons()),
                       "opposite_bearing_pairs": [["".join(map(str, p)) for p in q]
                                                  for q in s.opposite_bearing_pairs()]})


def _cube_dict(c):
    return {"index": c.index, "dimension": c.dimension, "hyperplanes": sorted(c.theta_classes),
            "vertices": sorted(c.vertices, key=cx.vertex_key), "boundary_affected": c.boundary_affected}


def cmd_free_faces(a):
    X = formats.load_complex(a.file)
    faces = hp.free_faces(X)
    if a.interior:
        faces = [f for f in faces if not f.boundary_affected]
    return Result(FAIL if faces else OK, {"count": len(faces), "free_faces": [_cube_dict(f) for f in faces]})


def cmd_irreducible(a):
    X = formats.load_complex(a.file)
    v = hp.is_irreducible(X)
    payload = {"irreducible": v.irreducible}
    if v.parts:
        payload["parts"] = [sorted(p) for p in v.parts]
    return Result(OK if v else FAIL, payload)


def cmd_cube_separates(a):
    X = formats.load_complex(a.file)
    if len(a.cube) != 2:
        raise argparse.ArgumentTypeError("give --cube exactly twice")
    c1, c2 = (int(c) for c in a.cube)
    cubes = cx.enumerate_cubes(X)
    for c in (c1, c2):
        if not 0 <= c < len(cubes):
            raise argparse.ArgumentTypeError(f"cube index {c} out of range 0..{len(cubes) - 1}")
    sep = hp.cube_pair_separates(X, c1, c2)
    if sep is None:
        return Result(FAIL, {"cubes": [c1, c2], "separated": None, "verdict": "no witness"})
    return Result(OK, {"cubes": [c1, c2], "separated": list(sep), "verdict": "witness"})


def _halfspace(text):
    h, _, s = text.partition(":")
    side = {"a": 0, "b": 1, "0": 0, "1": 1}.get(s)
    if side is None:
        raise argparse.ArgumentTypeError(f"halfspace must look like H:a or H:b, got {text!r}")
    return int(h), side


def cmd_checkpoints(a):
    X = formats.load_complex(a.file)
    g = actions.verify_automorphism(X, formats.load_map(a.map))
    if a.power != 1:
        g = actions.power(X, g, a.power)
    rng = tuple(a.range) if a.range else None
    cs = actions.build_checkpoint_system(X, g, _halfspace(a.halfspace), rng, a.L)
    return Result(OK, cs.as_dict())


def cmd_verify_checkpoints(a):
    X = formats.load_complex(a.file)
    cs = formats.checkpoints_from_dict(X, formats.read_json(a.system))
    rep = actions.verify_checkpoint_system(X, cs)
    return Result(OK if rep.ok else FAIL, rep.as_dict())


def _group(a, X):
    gens, bound = formats.load_group_spec(a.group)
    return actions.group_closure(X, gens, bound)


def cmd_stabilizers(a):
    X = formats.load_complex(a.file)
    G = _group(a, X)
    rep = actions.stabilizer_intersection(X, G, a.a, a.b)
    payload = rep.as_dict()
    payload["group_order"] = G.order
    return Result(OK, payload)


def cmd_criterion(a):
    X = formats.load_complex(a.file)
    G = _group(a, X)
    found = actions.criterion_scan(X, G, a.threshold)
    return Result(OK if found else FAIL, {"group_order": G.order, "witnesses": found}, lines=found)


def cmd_weak_acyl(a):
    X = formats.load_complex(a.file)
    G = _group(a, X)
    v = actions.weak_acyl_scan(X, G, a.L)
    payload = v.as_dict()
    payload["group_order"] = G.order
    return Result(FAIL if v.no_pairs else OK, payload)


def cmd_artin_fc(a):
    G = formats.load_coxeter(a.file)
    v = artin.is_fc_type(G)
    d = artin.coxeter_diameter(G)
    payload = {"fc": v.fc, "failing_clique": list(v.failing_clique) if v.failing_clique else None,
               "diameter": "inf" if d == artin.INF else d,
               "spherical_subsets": [list(T) for T in artin.spherical_subsets(G)]}
    return Result(OK if v else FAIL, payload)


def cmd_ruth(a):
    G = formats.load_coxeter(a.file)
    w = artin.ruth_witness(G)
    d = artin.coxeter_diameter(G)
    payload = {"diameter": "inf" if d == artin.INF else d, "witness": list(w) if w else None}
    if w:
        l1, l2 = (artin.hyperplane_stabilizer_label(G, s) for s in w)
        payload["labels"] = {w[0]: sorted(l1, key=G.position), w[1]: sorted(l2, key=G.position)}
        payload["label_intersection"] = sorted(l1 & l2, key=G.position)
    return Result(OK if w else FAIL, payload)


def cmd_artin_deligne(a):
    G = formats.load_coxeter(a.file)
    ball = artin.deligne_ball(G, a.length, a.oracle)
    if a.sidecar:
        Path(a.sidecar).write_text(formats.dumps(ball.sidecar()))
    return Result(OK, raw=formats.dump_complex(ball.to_complex()))


def cmd_gen(a):
    spec = fixtures.GeneratorSpec(a.kind, tuple(a.params), a.seed)
    return Result(OK, raw=formats.dump_complex(fixtures.generate(spec)))


def cmd_export_dot(a):
    X = formats.load_complex(a.file)
    if a.what == "crossing":
        return Result(OK, raw=formats.crossing_dot(X))
    labels = formats.read_json(a.sidecar).get("edge_labels", {}) if a.sidecar else None
    return Result(OK, raw=formats.skeleton_dot(X, labels))


# -- parser -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cubeact", description="Hyperplane, bridge and group-action checks on finite median graphs.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, help, file="complex JSON file"):
        sp = sub.add_parser(name, help=help, description=help)
        if file:
            sp.add_argument("file", help=file)
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--output", "-o", help="write the report here instead of stdout")
        sp.set_defaults(fn=fn)
        return sp

    add("validate", cmd_validate, "check the median property; exit 1 with a witness triple if it fails")
    add("hyperplanes", cmd_hyperplanes, "list hyperplanes with their halfspaces and depths")
    sp = add("classify", cmd_classify, "relation between hyperplanes (transverse, parallel, strongly or uber separated)")
    sp.add_argument("--pair", nargs=2, type=int, metavar=("H1", "H2"))
    add("crossing", cmd_crossing, "crossing graph of the hyperplanes")
    sp = add("bridge", cmd_bridge, "bridge and gates between two parallel hyperplanes")
    sp.add_argument("--pair", nargs=2, type=int, metavar=("H1", "H2"), required=True)
    sp = add("bridge-check", cmd_bridge_check,
             "gate distance formula (and, for uber-separated pairs, the bridge cut); exit 1 on violations")
    sp.add_argument("--pair", nargs=2, type=int, metavar=("H1", "H2"), required=True)
    sp = add("sectors", cmd_sectors, "sectors of pairwise crossing hyperplanes")
    sp.add_argument("--family", nargs="+", type=int)
    sp.add_argument("--cube", type=int, help="use the hyperplanes of this cube as the family")
    sp = add("free-faces", cmd_free_faces, "cubes lying in exactly one larger cube; exit 1 if any")
    sp.add_argument("--interior", action="store_true", help="ignore faces touching non-interior vertices")
    add("irreducible", cmd_irreducible, "product decomposition test via the crossing graph; exit 1 if reducible")
    sp = add("cube-separates", cmd_cube_separates,
             "a hyperplane pair separated by every hyperplane of two cubes; exit 1 with 'no witness'")
    sp.add_argument("--cube", action="append", type=int, required=True, help="cube index (give twice)")
    sp = add("checkpoints", cmd_checkpoints, "build a checkpoint system from bridge translates")
    sp.add_argument("--map", required=True, help="automorphism JSON file")
    sp.add_argument("--power", type=int, default=1, help="use this power of the map")
    sp.add_argument("--halfspace", required=True, help="starting halfspace as H:a or H:b")
    sp.add_argument("--range", nargs=2, type=int, metavar=("LO", "HI"),
                    help="translate indices (default: as far as the window allows)")
    sp.add_argument("--L", type=int, default=1, help="error constant in hops")
    sp = add("verify-checkpoints", cmd_verify_checkpoints, "check a checkpoint system; exit 1 on violations")
    sp.add_argument("system", help="checkpoint system JSON file")
    for name, fn, help in (("stabilizers", cmd_stabilizers, "common stabiliser of two objects"),
                           ("criterion", cmd_criterion, "small-stabiliser hypothesis scan; exit 1 if no witness"),
                           ("weak-acyl", cmd_weak_acyl, "most group elements fixing two far-apart vertices")):
        sp = add(name, fn, help)
        sp.add_argument("--group", required=True, help="group JSON file")
        if name == "stabilizers":
            sp.add_argument("--a", required=True, help="hyperplane:H, cube:C or vertex:V")
            sp.add_argument("--b", required=True, help="hyperplane:H, cube:C or vertex:V")
        elif name == "criterion":
            sp.add_argument("--threshold", type=int, default=1)
        else:
            sp.add_argument("--L", type=int, required=True)
    add("artin-fc", cmd_artin_fc, "FC-type test of a Coxeter graph; exit 1 with the failing clique",
        file="Coxeter graph JSON file")
    add("ruth", cmd_ruth, "generators at distance >= 3 with disjoint links; exit 1 if none",
        file="Coxeter graph JSON file")
    sp = add("artin-deligne", cmd_artin_deligne,
             "coset ball of the Deligne complex. The radius bounds the word length of coset "
             "representatives, not graph distance: vertex stabilisers are infinite.",
             file="Coxeter graph JSON file")
    sp.add_argument("--length", type=int, required=True, help="word-length bound on representatives")
    sp.add_argument("--oracle", choices=("raag", "free"), help="normal-form oracle (default: pick automatically)")
    sp.add_argument("--sidecar", help="write coset and edge-label data here")
    sp = add("gen", cmd_gen, "generate a fixture complex", file=None)
    sp.add_argument("kind", choices=fixtures.KINDS)
    sp.add_argument("params", nargs="*", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp = add("export-dot", cmd_export_dot, "Graphviz export")
    sp.add_argument("--what", choices=("crossing", "skeleton"), default="skeleton")
    sp.add_argument("--sidecar", help="Deligne sidecar supplying edge labels")
    return p


def _emit(a, res: Result):
    if res.raw is not None:
        text = res.raw
    elif a.format == "json":
        if res.lines is not None:
            text = "".join(json.dumps(r, sort_keys=True) + "\n" for r in res.lines)
        else:
            text = formats.dumps(res.payload)
    else:
        text = _text(res.payload) + "\n"
    if a.output:
        Path(a.output).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    try:
        res = a.fn(a)
        _emit(a, res)
    except (CubeActError, argparse.ArgumentTypeError, ValueError, OSError) as exc:
        print(f"cubeact {a.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return ERROR
    if res.code == FAIL and a.command == "cube-separates":
        print("no witness", file=sys.stderr)
    return res.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
