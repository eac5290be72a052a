"""Median-graph model of a CAT(0) cube complex.

A complex is stored as its 1-skeleton: a finite, simple, connected graph with
an all-pairs hop-distance table. Cubes, links and hyperplanes are derived from
the graph, never supplied. Infinite complexes are represented by finite
windows; vertices whose full neighbourhood is not present carry
``interior=False`` and results touching them are flagged ``boundary_affected``.

Vertex identifiers are opaque JSON scalars (``int`` or ``str``). Internally
vertices are indexed ``0..n-1`` in identifier order (integers numerically
first, then strings lexicographically), so index order *is* the deterministic
output order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Iterable, Sequence

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from . import _theta
from .errors import (
    Disconnected,
    DuplicateVertex,
    NotConvex,
    NotGeodesic,
    NotMedian,
    SelfLoop,
    UnknownEndpoint,
)

Vertex = Hashable


def vertex_key(v):
    if isinstance(v, bool):
        raise TypeError("boolean vertex identifiers are not supported")
    if isinstance(v, int):
        return (0, v, "")
    return (1, 0, str(v))


class CubeComplex:
    """Immutable 1-skeleton of a cube complex with its graph metric.

    Build instances with :func:`build_complex`. Derived data (Θ-classes,
    cubes, sparse adjacency) is cached on first use; the cache never changes
    observable results.
    """

    __slots__ = ("ids", "index", "edges", "adj", "dist", "interior", "_cache")

    def __init__(self, ids, edges, adj, dist, interior):
        self.ids: tuple = ids
        self.index: dict = {v: i for i, v in enumerate(ids)}
        self.edges: tuple = edges
        self.adj: tuple = adj
        self.dist: np.ndarray = dist
        self.interior: np.ndarray = interior
        self._cache: dict = {}

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def diameter(self) -> int:
        return int(self.dist.max())

    @property
    def has_window(self) -> bool:
        return not bool(self.interior.all())

    def idx(self, v) -> int:
        try:
            return self.index[v]
        except KeyError:
            raise UnknownEndpoint(f"unknown vertex {v!r}") from None

    def idxs(self, vs: Iterable) -> list[int]:
        return [self.idx(v) for v in vs]

    def d(self, x, y) -> int:
        return int(self.dist[self.idx(x), self.idx(y)])

    def neighbors(self, v) -> list:
        return [self.ids[j] for j in self.adj[self.idx(v)]]

    def is_interior(self, v) -> bool:
        return bool(self.interior[self.idx(v)])

    def mask(self, vs: Iterable) -> np.ndarray:
        m = np.zeros(self.n, dtype=bool)
        m[self.idxs(vs)] = True
        return m

    def to_ids(self, indices: Iterable[int]) -> frozenset:
        return frozenset(self.ids[i] for i in indices)

    def sparse_adjacency(self) -> csr_matrix:
        a = self._cache.get("csr")
        if a is None:
            rows = [i for i, j in self.edges] + [j for i, j in self.edges]
            cols = [j for i, j in self.edges] + [i for i, j in self.edges]
            a = csr_matrix((np.ones(len(rows), dtype=np.int32), (rows, cols)), shape=(self.n, self.n))
            self._cache["csr"] = a
        return a

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.ids)
        g.add_edges_from((self.ids[i], self.ids[j]) for i, j in self.edges)
        return g

    def __eq__(self, other):
        if not isinstance(other, CubeComplex):
            return NotImplemented
        return (
            self.ids == other.ids
            and self.edges == other.edges
            and bool(np.array_equal(self.interior, other.interior))
        )

    def __hash__(self):
        return hash((self.ids, self.edges))

    def __repr__(self):
        return f"CubeComplex(n={self.n}, edges={len(self.edges)}, diameter={self.diameter})"


def build_complex(vertex_list: Sequence, edge_list: Iterable, interior_flags=None) -> CubeComplex:
    """Build a complex from vertex and edge lists.

    ``interior_flags`` may be ``None`` (everything interior), a mapping
    ``vertex -> bool`` or an iterable of interior vertices. The median property
    is *not* checked here; call :func:`is_median_graph` for that.
    """
    vertex_list = list(vertex_list)
    if not vertex_list:
        raise ValueError("vertex list is empty")
    seen = set()
    for v in vertex_list:
        if v in seen:
            raise DuplicateVertex(f"duplicate vertex {v!r}")
        seen.add(v)
    ids = tuple(sorted(vertex_list, key=vertex_key))
    index = {v: i for i, v in enumerate(ids)}

    edge_set = set()
    for e in edge_list:
        u, v = e
        if u not in index or v not in index:
            missing = u if u not in index else v
            raise UnknownEndpoint(f"edge {u!r}-{v!r} references unknown vertex {missing!r}")
        if u == v:
            raise SelfLoop(f"self-loop at {u!r}")
        i, j = index[u], index[v]
        edge_set.add((min(i, j), max(i, j)))
    if not edge_set and len(ids) > 1:
        raise Disconnected("no edges between multiple vertices")
    edges = tuple(sorted(edge_set))

    n = len(ids)
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for i, j in edges:
        nbrs[i].append(j)
        nbrs[j].append(i)
    adj = tuple(tuple(sorted(a)) for a in nbrs)

    if n > 1:
        rows = [i for i, _ in edges]
        cols = [j for _, j in edges]
        graph = csr_matrix((np.ones(len(edges)), (rows, cols)), shape=(n, n))
        ncomp, _ = connected_components(graph, directed=False)
        if ncomp > 1:
            raise Disconnected(f"graph has {ncomp} connected components")
        dist = shortest_path(graph, directed=False, unweighted=True).astype(np.int32)
    else:
        dist = np.zeros((1, 1), dtype=np.int32)
    dist.setflags(write=False)

    interior = np.ones(n, dtype=bool)
    if interior_flags is not None:
        if isinstance(interior_flags, dict):
            for v, flag in interior_flags.items():
                if v not in index:
                    raise UnknownEndpoint(f"interior flag for unknown vertex {v!r}")
                interior[index[v]] = bool(flag)
        else:
            interior[:] = False
            for v in interior_flags:
                if v not in index:
                    raise UnknownEndpoint(f"interior flag for unknown vertex {v!r}")
                interior[index[v]] = True
    interior.setflags(write=False)
    return CubeComplex(ids, edges, adj, dist, interior)


def interior_subcomplex(X: CubeComplex) -> CubeComplex:
    """Subgraph induced on the interior vertices; raises Disconnected if it falls apart."""
    keep = [v for v in X.ids if X.is_interior(v)]
    if not keep:
        raise ValueError("window has no interior vertices")
    inside = set(keep)
    es = [(X.ids[i], X.ids[j]) for i, j in X.edges if X.ids[i] in inside and X.ids[j] in inside]
    return build_complex(keep, es)


# -- medians -----------------------------------------------------------------


def _median_set(X: CubeComplex, x: int, y: int, z: int) -> np.ndarray:
    D = X.dist
    ok = (D[x] + D[y] == D[x, y]) & (D[y] + D[z] == D[y, z]) & (D[x] + D[z] == D[x, z])
    return np.flatnonzero(ok)


def median(X: CubeComplex, x, y, z):
    """Return the unique median of ``x, y, z``; raise :class:`NotMedian` otherwise."""
    m = _median_set(X, X.idx(x), X.idx(y), X.idx(z))
    if len(m) != 1:
        raise NotMedian(f"triple ({x!r}, {y!r}, {z!r}) has {len(m)} medians")
    return X.ids[int(m[0])]


@dataclass(frozen=True)
class MedianVerdict:
    is_median: bool
    witness: tuple | None = None
    witness_medians: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.is_median


def _brute_force_witness(X: CubeComplex):
    """First triple (lexicographic in index order) without a unique median."""
    D = X.dist
    n = X.n
    for x in range(n):
        for y in range(x + 1, n):
            M = np.flatnonzero(D[x] + D[y] == D[x, y])
            # count, for every z, medians m in I(x,y) ∩ I(x,z) ∩ I(y,z)
            in_xz = D[x, M][None, :] + D[M, :].T == D[x, :][:, None]
            in_yz = D[y, M][None, :] + D[M, :].T == D[y, :][:, None]
            counts = (in_xz & in_yz).sum(axis=1)
            counts[: y + 1] = 1
            bad = np.flatnonzero(counts != 1)
            if len(bad):
                z = int(bad[0])
                return (x, y, z), int(counts[z])
    return None, None


def is_median_graph(X: CubeComplex) -> MedianVerdict:
    """Decide whether every vertex triple has exactly one median.

    Bipartite graphs whose Θ-relation is transitive and whose Θ-coordinates
    embed isometrically are partial cubes; there a triple has at most one
    median, namely its coordinatewise majority, so the exhaustive scan only
    has to look that vector up. Anything else is not median, and a witness
    triple is found by direct search.
    """
    cached = X._cache.get("median_verdict")
    if cached is not None:
        return cached
    verdict = _decide_median(X)
    X._cache["median_verdict"] = verdict
    return verdict


def _decide_median(X: CubeComplex) -> MedianVerdict:
    n = X.n
    if n <= 2:
        return MedianVerdict(True)
    theta = _theta.theta_data(X)
    reason = ""
    if not theta.bipartite:
        reason = "not bipartite"
    elif not theta.transitive:
        reason = "Θ-relation not transitive"
    elif not theta.isometric:
        reason = "Θ-coordinates do not embed isometrically"
    if reason:
        w, count = _brute_force_witness(X)
        if w is None:
            # cannot happen for a non-partial-cube, kept as a guard
            raise AssertionError("non-median graph without witness triple")
        return MedianVerdict(False, tuple(X.ids[i] for i in w), count, reason)

    codes = theta.packed  # (n, W) uint64
    hashes = theta.hashes
    order = np.argsort(hashes, kind="stable")
    sorted_hashes = hashes[order]
    mult = theta.hash_mult
    for x in range(n - 2):
        rest = np.arange(x + 1, n)
        cx = codes[x]
        cy = codes[rest]
        maj = ((cx & cy)[:, None, :]) | ((cx & cy)[None, :, :]) | (cy[:, None, :] & cy[None, :, :])
        h = (maj * mult).sum(axis=2, dtype=np.uint64)
        pos = np.searchsorted(sorted_hashes, h)
        pos = np.minimum(pos, n - 1)
        cand = order[pos]
        found = (sorted_hashes[pos] == h) & (codes[cand] == maj).all(axis=2)
        k = len(rest)
        upper = np.triu(np.ones((k, k), dtype=bool), 1)
        bad = upper & ~found
        if bad.any():
            a, b = np.argwhere(bad)[0]
            y, z = int(rest[a]), int(rest[b])
            return MedianVerdict(
                False,
                (X.ids[x], X.ids[y], X.ids[z]),
                len(_median_set(X, x, y, z)),
                "majority vector is not a vertex",
            )
    return MedianVerdict(True)


# -- intervals and convexity -------------------------------------------------


@dataclass(frozen=True)
class Interval:
    source: Vertex
    target: Vertex
    members: frozenset
    boundary_affected: bool = False

    def __len__(self):
        return len(self.members)

    def __contains__(self, v):
        return v in self.members


def _interval_mask(X: CubeComplex, x: int, y: int) -> np.ndarray:
    D = X.dist
    return D[x] + D[y] == D[x, y]


def interval(X: CubeComplex, x, y) -> Interval:
    i, j = X.idx(x), X.idx(y)
    m = _interval_mask(X, i, j)
    return Interval(x, y, X.to_ids(np.flatnonzero(m)), not bool(X.interior[m].all()))


def _is_convex_mask(X: CubeComplex, inside: np.ndarray) -> bool:
    S = np.flatnonzero(inside)
    out = np.flatnonzero(~inside)
    if len(S) == 0:
        raise ValueError("convexity of the empty set is not defined")
    if len(out) == 0:
        return True
    D = X.dist
    DS = D[np.ix_(S, S)]
    Dout = D[np.ix_(out, S)]
    for a, x in enumerate(S):
        # z outside S lies on a geodesic x..y for some y in S
        hit = (Dout[:, a][:, None] + Dout) == DS[a][None, :]
        if hit.any():
            return False
    return True


def is_convex(X: CubeComplex, S: Iterable) -> bool:
    """True iff every geodesic between two vertices of ``S`` stays in ``S``."""
    S = list(S)
    if not S:
        raise ValueError("S must be non-empty")
    return _is_convex_mask(X, X.mask(S))


# -- cubes -------------------------------------------------------------------


@dataclass(frozen=True)
class Cube:
    index: int
    dimension: int
    vertices: frozenset
    theta_classes: frozenset
    maximal: bool
    boundary_affected: bool = False

    def __repr__(self):
        return f"Cube#{self.index}(dim={self.dimension}, classes={sorted(self.theta_classes)})"


@dataclass
class _CubeTable:
    cubes: list  # list[Cube]
    by_vertices: dict  # frozenset[int] -> cube index
    index_sets: list  # list[frozenset[int]]
    containing: list  # cube index -> list of cube indices properly containing it


def _link_pairs(X: CubeComplex, v: int) -> list[tuple[int, int]]:
    """Pairs of neighbours of ``v`` spanning a square at ``v``."""
    nb = X.adj[v]
    nbsets = [set(X.adj[a]) for a in nb]
    pairs = []
    for p, q in combinations(range(len(nb)), 2):
        common = nbsets[p] & nbsets[q]
        common.discard(v)
        if common:
            pairs.append((nb[p], nb[q]))
    return pairs


def _cube_table(X: CubeComplex) -> _CubeTable:
    cached = X._cache.get("cubes")
    if cached is not None:
        return cached
    theta = _theta.theta_data(X)
    if not theta.transitive:
        raise NotMedian("cube enumeration needs a median graph (Θ not transitive)")
    across = theta.across  # list of dict class -> neighbour

    found: dict[frozenset, frozenset] = {}
    for v in range(X.n):
        link = nx.Graph()
        link.add_nodes_from(X.adj[v])
        link.add_edges_from(_link_pairs(X, v))
        for clique in nx.enumerate_all_cliques(link):
            classes = [theta.edge_class[(min(v, a), max(v, a))] for a in clique]
            verts = {v}
            ok = True
            for c in classes:
                step = set()
                for u in verts:
                    w = across[u].get(c)
                    if w is None:
                        ok = False
                        break
                    step.add(w)
                if not ok:
                    break
                verts |= step
            if not ok or len(verts) != 1 << len(classes):
                continue
            key = frozenset(verts)
            if key not in found:
                found[key] = frozenset(classes)
    # a lone vertex graph still has its 0-cube
    for v in range(X.n):
        found.setdefault(frozenset([v]), frozenset())

    def sort_key(item):
        verts, classes = item
        return (-len(classes), sorted(verts))

    items = sorted(found.items(), key=sort_key)
    by_vertices = {verts: k for k, (verts, _) in enumerate(items)}
    containing: list[list[int]] = [[] for _ in items]
    for k, (verts, classes) in enumerate(items):
        for face in _faces(theta, verts, classes):
            if face != verts:
                containing[by_vertices[face]].append(k)
    cubes = []
    for k, (verts, classes) in enumerate(items):
        cubes.append(
            Cube(
                index=k,
                dimension=len(classes),
                vertices=X.to_ids(verts),
                theta_classes=frozenset(classes),
                maximal=not containing[k],
                boundary_affected=not bool(X.interior[list(verts)].all()),
            )
        )
    table = _CubeTable(cubes, by_vertices, [verts for verts, _ in items], containing)
    X._cache["cubes"] = table
    return table


def _faces(theta, verts: frozenset, classes: frozenset):
    """All faces (including the cube itself) as vertex index sets."""
    classes = list(classes)
    faces = [frozenset(verts)]
    for c in classes:
        nxt = []
        for f in faces:
            side = theta.sides_b[c]
            a = frozenset(u for u in f if not side[u])
            b = frozenset(u for u in f if side[u])
            nxt.extend((f, a, b) if a and b else (f,))
        faces = nxt
    return set(faces)


def enumerate_cubes(X: CubeComplex) -> list[Cube]:
    """All cubes of ``X``, highest dimension first, with maximality flags.

    ``Cube.theta_classes`` holds hyperplane ids as numbered by
    :func:`cubeact.hyperplanes.hyperplanes`.
    """
    return list(_cube_table(X).cubes)


def cubes_by_dimension(X: CubeComplex) -> dict[int, list[Cube]]:
    out: dict[int, list[Cube]] = {}
    for c in enumerate_cubes(X):
        out.setdefault(c.dimension, []).append(c)
    return dict(sorted(out.items()))


# -- links -------------------------------------------------------------------


@dataclass(frozen=True)
class Link:
    center: Vertex
    vertices: tuple  # neighbours of the centre, one per incident edge
    edges: frozenset  # frozenset of 2-element frozensets of neighbours
    is_join: bool
    boundary_affected: bool = False

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(tuple(e) for e in self.edges)
        return g


def _is_join(g: nx.Graph) -> bool:
    if g.number_of_nodes() < 2:
        return False
    return not nx.is_connected(nx.complement(g))


def vertex_link(X: CubeComplex, v) -> Link:
    """Link of ``v``: one vertex per incident edge, an edge per square corner.

    Higher simplices are implied by cubes (flag condition in median graphs).
    ``is_join`` is decided on the 1-skeleton: the link is a join iff its
    complement graph is disconnected.
    """
    i = X.idx(v)
    pairs = _link_pairs(X, i)
    g = nx.Graph()
    g.add_nodes_from(X.adj[i])
    g.add_edges_from(pairs)
    nodes = tuple(X.ids[a] for a in X.adj[i])
    edges = frozenset(frozenset((X.ids[a], X.ids[b])) for a, b in pairs)
    return Link(v, nodes, edges, _is_join(g), not bool(X.interior[i]))


# -- geodesic cuts -----------------------------------------------------------


def _reach_avoiding(X: CubeComplex, x: int, blocked: np.ndarray) -> np.ndarray:
    """``A[z]``: some geodesic from ``x`` to ``z`` has no blocked vertex except possibly ``z``.

    Geodesics from ``x`` are exactly paths along which the distance to ``x``
    grows by one per step, so one sweep by distance layers decides all
    targets at once.
    """
    A = np.zeros(X.n, dtype=bool)
    A[x] = True
    dx = X.dist[x]
    adj = X.sparse_adjacency()
    for k in range(1, int(dx.max()) + 1):
        prev = (dx == k - 1) & A & ~blocked
        if not prev.any():
            break
        hit = adj.dot(prev.astype(np.int32)) > 0
        A |= hit & (dx == k)
    return A


def geodesic_cut(X: CubeComplex, x, y, S: Iterable) -> bool:
    """True iff every geodesic from ``x`` to ``y`` contains a vertex of ``S``.

    If ``x`` or ``y`` is itself in ``S`` the answer is trivially true.
    """
    i, j = X.idx(x), X.idx(y)
    blocked = X.mask(S)
    if blocked[i] or blocked[j]:
        return True
    return not bool(_reach_avoiding(X, i, blocked)[j])


def cut_targets(X: CubeComplex, x: int, blocked: np.ndarray) -> np.ndarray:
    """Vectorised :func:`geodesic_cut` from index ``x`` to every target index."""
    if blocked[x]:
        return np.ones(X.n, dtype=bool)
    cut = ~_reach_avoiding(X, x, blocked)
    cut |= blocked
    return cut


# -- geodesic extension -------------------------------------------------------


def extend_geodesic_step(X: CubeComplex, path: Sequence):
    """Return an edge ``(end, w)`` extending the geodesic ``path``, or ``None``."""
    if not path:
        raise NotGeodesic("empty path")
    p = X.idxs(path)
    D = X.dist
    for k in range(1, len(p)):
        if p[k] not in X.adj[p[k - 1]]:
            raise NotGeodesic(f"{path[k - 1]!r} and {path[k]!r} are not adjacent")
        if D[p[0], p[k]] != k:
            raise NotGeodesic(f"path is not geodesic at step {k}")
    end = p[-1]
    length = len(p) - 1
    for w in X.adj[end]:
        if D[p[0], w] == length + 1:
            return (X.ids[end], X.ids[w])
    return None


def gate_index(X: CubeComplex, x: int, inside: np.ndarray) -> int:
    """Index of the unique closest vertex of the convex set ``inside`` to ``x``."""
    S = np.flatnonzero(inside)
    dx = X.dist[x, S]
    best = np.flatnonzero(dx == dx.min())
    if len(best) != 1:
        raise NotConvex("closest point is not unique; set is not convex")
    return int(S[best[0]])
