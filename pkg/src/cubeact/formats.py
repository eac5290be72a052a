"""JSON exchange formats and DOT export.

complex      {"vertices": [id, ...], "edges": [[u, v], ...], "interior": [id, ...]}
             ``interior`` is optional and omitted when every vertex is interior.
coxeter      {"generators": ["s0", ...], "edges": [["s0", "s1", 3], ...]}
automorphism {"map": {id: id, ...}}
group        {"generators": [map, ...], "bound": N}
checkpoints  as written by :meth:`CheckpointSystem.as_dict`

Serialization is deterministic: sorted keys, vertices in identifier order and
edges with the smaller endpoint first.
"""
from __future__ import annotations

import json
from pathlib import Path

from .actions import CheckpointSystem, _overlaps, resolve_id, verify_automorphism
from .artin import CoxeterGraph
from .complex import CubeComplex, build_complex, vertex_key
from .errors import FormatError
from .hyperplanes import crossing_graph


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def read_json(path) -> object:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _check_id(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise FormatError(f"{where}: vertex ids must be integers or strings, got {v!r}")
    return v


# -- complexes -----------------------------------------------------------------------


def complex_to_dict(X: CubeComplex) -> dict:
    ids = X.ids
    edges = sorted(([ids[i], ids[j]] for i, j in X.edges), key=lambda e: (vertex_key(e[0]), vertex_key(e[1])))
    out = {"vertices": list(ids), "edges": edges}
    if not X.interior.all():
        out["interior"] = [v for v in ids if X.is_interior(v)]
    return out


def complex_from_dict(d) -> CubeComplex:
    if not isinstance(d, dict) or "vertices" not in d or "edges" not in d:
        raise FormatError("complex must be an object with 'vertices' and 'edges'")
    verts, edges = d["vertices"], d["edges"]
    if not isinstance(verts, list) or not isinstance(edges, list):
        raise FormatError("'vertices' and 'edges' must be lists")
    verts = [_check_id(v, "vertices") for v in verts]
    pairs = []
    for e in edges:
        if not isinstance(e, list) or len(e) != 2:
            raise FormatError(f"edge {e!r} must be a two-element list")
        pairs.append((_check_id(e[0], "edges"), _check_id(e[1], "edges")))
    interior = d.get("interior")
    if interior is not None:
        if not isinstance(interior, list):
            raise FormatError("'interior' must be a list")
        interior = [_check_id(v, "interior") for v in interior]
    return build_complex(verts, pairs, interior)


def load_complex(path) -> CubeComplex:
    return complex_from_dict(read_json(path))


def dump_complex(X: CubeComplex) -> str:
    return dumps(complex_to_dict(X))


# -- Coxeter graphs ------------------------------------------------------------------


def coxeter_from_dict(d) -> CoxeterGraph:
    if not isinstance(d, dict) or not isinstance(d.get("generators"), list):
        raise FormatError("Coxeter graph must be an object with a 'generators' list")
    gens = d["generators"]
    if not all(isinstance(s, str) for s in gens):
        raise FormatError("generator names must be strings")
    edges = []
    for e in d.get("edges", []):
        if not isinstance(e, list) or len(e) != 3:
            raise FormatError(f"edge {e!r} must be [s, t, label]")
        edges.append(tuple(e))
    return CoxeterGraph.build(gens, edges)


def load_coxeter(path) -> CoxeterGraph:
    return coxeter_from_dict(read_json(path))


# -- maps, groups, checkpoint systems --------------------------------------------------


def map_from_dict(d) -> dict:
    if isinstance(d, dict) and "map" in d:
        d = d["map"]
    if not isinstance(d, dict):
        raise FormatError("automorphism must be an object {\"map\": {id: id}}")
    return d


def load_map(path) -> dict:
    return map_from_dict(read_json(path))


def load_group_spec(path) -> tuple[list, int]:
    d = read_json(path)
    if not isinstance(d, dict) or not isinstance(d.get("generators"), list):
        raise FormatError("group must be an object with a 'generators' list")
    bound = d.get("bound", 10_000)
    if isinstance(bound, bool) or not isinstance(bound, int) or bound < 1:
        raise FormatError("'bound' must be a positive integer")
    return [map_from_dict(g) for g in d["generators"]], bound


def checkpoints_from_dict(X: CubeComplex, d) -> CheckpointSystem:
    try:
        g = verify_automorphism(X, map_from_dict(d["map"]))
        translates = {int(i): frozenset(resolve_id(X, v) for v in vs) for i, vs in d["translates"].items()}
        base = frozenset(resolve_id(X, v) for v in d["base_checkpoint"])
        hs = tuple(int(x) for x in d["halfspace"])
        L = int(d["error_constant"])
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise FormatError(f"malformed checkpoint system: {exc}") from None
    return CheckpointSystem(g, hs, base, dict(sorted(translates.items())), L, _overlaps(translates))


# -- DOT ------------------------------------------------------------------------------


def _q(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def crossing_dot(X: CubeComplex) -> str:
    cg = crossing_graph(X)
    lines = ["graph crossing {"]
    lines += [f"  {h};" for h in cg.nodes]
    lines += [f"  {a} -- {b};" for a, b in sorted(cg.adjacency)]
    lines.append("}")
    return "\n".join(lines) + "\n"


def skeleton_dot(X: CubeComplex, edge_labels: dict | None = None) -> str:
    """1-skeleton; ``edge_labels`` maps ``"u -- v"`` to a label (Deligne sidecar)."""
    edge_labels = edge_labels or {}
    lines = ["graph skeleton {"]
    for v in X.ids:
        attr = "" if X.is_interior(v) else " [style=dashed]"
        lines.append(f"  {_q(v)}{attr};")
    for i, j in X.edges:
        u, v = X.ids[i], X.ids[j]
        lab = edge_labels.get(f"{u} -- {v}", edge_labels.get(f"{v} -- {u}"))
        attr = f" [label={_q(lab)}]" if lab is not None else ""
        lines.append(f"  {_q(u)} -- {_q(v)}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"
