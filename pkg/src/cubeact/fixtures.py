"""Deterministic test complexes.

Every generator returns a :class:`~cubeact.complex.CubeComplex` whose vertex
names depend only on the parameters, so the same spec always yields the same
complex. Windows of infinite complexes mark vertices with missing neighbours
as non-interior.

kinds
-----
grid(w, h)          product of a w-path and an h-path (w*h vertices)
tree(n, seed)       random recursive tree on n vertices
ncube(n)            the n-cube, vertices are bit strings
staircase(k)        k unit squares, consecutive ones sharing an edge, climbing
                    the diagonal (up, right, up, ...)
spiked(k)           k spiked 3-cubes joined spike to spike along a breadth-first
                    4-regular tree
pentagon_plane(r)   radius-r ball of the square tiling in which every vertex has
                    five squares around it
line(n)             the path -n..n
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

import networkx as nx

from .complex import CubeComplex, build_complex
from .errors import BadParameters

MAX_VERTICES = 2000
KINDS = ("grid", "tree", "ncube", "staircase", "spiked", "pentagon_plane", "line")
SPIKE_CORNERS = ("100", "010", "001", "111")


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    parameters: tuple = ()
    seed: int = 0


def generate(spec: GeneratorSpec) -> CubeComplex:
    if spec.kind not in KINDS:
        raise BadParameters(f"unknown kind {spec.kind!r}; expected one of {', '.join(KINDS)}")
    try:
        params = tuple(int(p) for p in spec.parameters)
    except (TypeError, ValueError):
        raise BadParameters(f"{spec.kind} parameters must be integers, got {list(spec.parameters)}") from None
    arity = {"grid": 2}.get(spec.kind, 1)
    if len(params) != arity:
        raise BadParameters(f"{spec.kind} takes {arity} integer parameter(s), got {len(params)}")
    if spec.kind == "tree":
        return tree(params[0], spec.seed)
    return globals()[spec.kind](*params)


def _check_size(n):
    if n > MAX_VERTICES:
        raise BadParameters(f"{n} vertices exceeds the limit of {MAX_VERTICES}")


def grid(w: int, h: int) -> CubeComplex:
    if w < 1 or h < 1:
        raise BadParameters("grid sides must be positive")
    _check_size(w * h)
    vs = [f"{x},{y}" for x in range(w) for y in range(h)]
    es = [(f"{x},{y}", f"{x + 1},{y}") for x in range(w - 1) for y in range(h)]
    es += [(f"{x},{y}", f"{x},{y + 1}") for x in range(w) for y in range(h - 1)]
    return build_complex(vs, es)


def tree(n: int, seed: int = 0) -> CubeComplex:
    if n < 1:
        raise BadParameters("tree needs at least one vertex")
    _check_size(n)
    rng = random.Random(seed)
    es = [(rng.randrange(i), i) for i in range(1, n)]
    return build_complex(range(n), es)


def ncube(n: int) -> CubeComplex:
    if n < 0 or n > 10:
        raise BadParameters("ncube dimension must be in 0..10")
    vs = [format(i, f"0{n}b") if n else "" for i in range(1 << n)]
    es = [(vs[i], vs[i ^ (1 << b)]) for i in range(1 << n) for b in range(n) if not i & (1 << b)]
    return build_complex(vs, es)


def _stair_squares(lo: int, hi: int):
    for j in range(lo, hi):
        x, y = j // 2, -(-j // 2)
        yield [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)]


def _stair_edges(lo, hi):
    es = set()
    for a, b, c, d in _stair_squares(lo, hi):
        for u, v in ((a, b), (a, c), (b, d), (c, d)):
            es.add((u, v))
    return es


def staircase(k: int) -> CubeComplex:
    """Squares 0..k-1; square j has lower-left corner (j//2, ceil(j/2))."""
    if k < 1:
        raise BadParameters("staircase needs at least one square")
    _check_size(2 * k + 2)
    es = _stair_edges(0, k)
    wide = nx.Graph(_stair_edges(-1, k + 1))
    vs = sorted({v for e in es for v in e})
    g = nx.Graph(es)
    name = lambda p: f"{p[0]},{p[1]}"
    interior = {name(v): g.degree(v) == wide.degree(v) for v in vs}
    return build_complex([name(v) for v in vs], [(name(u), name(v)) for u, v in es], interior)


def staircase_glide(X: CubeComplex) -> dict:
    """Partial glide ``(x, y) -> (y, x + 1)`` moving square j onto square j+1."""
    out = {}
    for v in X.ids:
        x, y = (int(t) for t in str(v).split(","))
        w = f"{y},{x + 1}"
        if w in X.index:
            out[v] = w
    return out


def spiked(k: int) -> CubeComplex:
    """Spiked cubes glued along a breadth-first 4-regular tree.

    Cube 0 sends its four spikes to children; every later cube uses its
    ``100`` spike for the parent and the other three for children. A glued
    spike is a single edge between the two cube corners. Unused spikes end in
    a free vertex ``c<i>:s<corner>``, marked non-interior.
    """
    if k < 1:
        raise BadParameters("spiked needs at least one cube")
    _check_size(10 * k + 2)
    vs, es = [], []
    for c in range(k):
        corners = [format(i, "03b") for i in range(8)]
        vs += [f"c{c}:{b}" for b in corners]
        for i in range(8):
            for bit in range(3):
                j = i ^ (1 << bit)
                if i < j:
                    es.append((f"c{c}:{corners[i]}", f"c{c}:{corners[j]}"))
    open_slots = [(0, s) for s in SPIKE_CORNERS]
    used = {}
    nxt = 1
    while open_slots and nxt < k:
        parent, corner = open_slots.pop(0)
        used[(parent, corner)] = nxt
        es.append((f"c{parent}:{corner}", f"c{nxt}:100"))
        open_slots += [(nxt, s) for s in SPIKE_CORNERS[1:]]
        nxt += 1
    interior = {v: True for v in vs}
    for c in range(k):
        for s in SPIKE_CORNERS:
            glued = (c, s) in used or (c > 0 and s == "100")
            if not glued:
                end = f"c{c}:s{s}"
                vs.append(end)
                es.append((f"c{c}:{s}", end))
                interior[end] = False
    return build_complex(vs, es, interior)


def _square_tiling(q: int, layers: int):
    """Grow a disc of the square tiling with q squares at every vertex.

    Returns ``(graph, squares, centre)``. Each round completes every boundary
    vertex to q squares: boundary edges get one new square and each vertex a
    fan of squares between them.
    """
    g = nx.Graph()
    squares = []
    counter = [0]

    def new():
        counter[0] += 1
        g.add_node(counter[0] - 1)
        return counter[0] - 1

    centre = new()
    spokes = [new() for _ in range(q)]
    for s in spokes:
        g.add_edge(centre, s)
    boundary, held = [], {}
    for i in range(q):
        w = new()
        a, b = spokes[i], spokes[(i + 1) % q]
        g.add_edges_from([(a, w), (w, b)])
        squares.append((centre, a, w, b))
        boundary += [a, w]
        held[a], held[w] = 2, 1
    for _ in range(layers - 1):
        n = len(boundary)
        out = [[new() for _ in range(q - 1 - held[v])] for v in boundary]
        for v, ss in zip(boundary, out):
            g.add_edges_from((v, s) for s in ss)
        nb, nheld = [], {}
        for i, v in enumerate(boundary):
            ss = out[i]
            fans = []
            for a, b in zip(ss, ss[1:]):
                w = new()
                g.add_edges_from([(a, w), (w, b)])
                squares.append((v, a, w, b))
                fans.append(w)
            a, b = ss[-1], out[(i + 1) % n][0]
            g.add_edge(a, b)
            squares.append((v, a, b, boundary[(i + 1) % n]))
            for j, s in enumerate(ss):
                nb.append(s)
                nheld[s] = 2
                if j < len(fans):
                    nb.append(fans[j])
                    nheld[fans[j]] = 1
        boundary, held = nb, nheld
    return g, squares, centre


def pentagon_plane(r: int) -> CubeComplex:
    """Ball of radius r about a vertex in the square tiling with 5-cycle links.

    Vertices are numbered by distance from the centre. A vertex is interior
    when all five of its squares lie in the ball.
    """
    if r < 1:
        raise BadParameters("pentagon_plane radius must be positive")
    if r > 5:
        raise BadParameters("pentagon_plane radius above 5 exceeds the vertex limit")
    g, squares, centre = _square_tiling(5, r + 1)
    dist = nx.single_source_shortest_path_length(g, centre)
    ball = sorted((v for v in g if dist[v] <= r), key=lambda v: (dist[v], v))
    _check_size(len(ball))
    name = {v: i for i, v in enumerate(ball)}
    full = {v: 0 for v in ball}
    for sq in squares:
        if all(dist[u] <= r for u in sq):
            for u in sq:
                full[u] += 1
    interior = {name[v]: full[v] == 5 for v in ball}
    es = [(name[u], name[v]) for u, v in g.subgraph(ball).edges]
    return build_complex(list(name.values()), es, interior)


def line(n: int) -> CubeComplex:
    """Path window -n..n; the two ends are non-interior."""
    if n < 1:
        raise BadParameters("line needs n >= 1")
    _check_size(2 * n + 1)
    vs = list(range(-n, n + 1))
    return build_complex(vs, [(i, i + 1) for i in range(-n, n)], {v: abs(v) < n for v in vs})


def line_shift(X: CubeComplex, step: int) -> dict:
    return {v: v + step for v in X.ids if v + step in X.index}


def line_reflection(X: CubeComplex) -> dict:
    return {v: -v for v in X.ids if -v in X.index}


def grid_rotation(w: int) -> dict:
    """Quarter turn of the square grid(w, w)."""
    return {f"{x},{y}": f"{y},{w - 1 - x}" for x in range(w) for y in range(w)}


def grid_reflection(w: int, h: int, axis: str) -> dict:
    if axis == "x":
        return {f"{x},{y}": f"{w - 1 - x},{y}" for x in range(w) for y in range(h)}
    if axis == "y":
        return {f"{x},{y}": f"{x},{h - 1 - y}" for x in range(w) for y in range(h)}
    if axis == "diag":
        return {f"{x},{y}": f"{y},{x}" for x in range(w) for y in range(h)}
    raise ValueError(f"unknown axis {axis!r}")


def standard_fixtures() -> dict[str, CubeComplex]:
    """The named fixture set used by the property and acceptance suites."""
    out = {
        "grid3x3": grid(3, 3),
        "grid5x5": grid(5, 5),
        "grid4x6": grid(4, 6),
        "ncube3": ncube(3),
        "ncube4": ncube(4),
        "line10": line(10),
    }
    for n, seed in ((12, 1), (20, 2), (30, 3)):
        out[f"tree{n}s{seed}"] = tree(n, seed)
    for k in (4, 6, 8):
        out[f"staircase{k}"] = staircase(k)
    for k in (1, 2, 3, 4):
        out[f"spiked{k}"] = spiked(k)
    for r in (2, 3, 4):
        out[f"pentagon{r}"] = pentagon_plane(r)
    return out
