"""Hyperplanes of a median graph and the relations between them.

A hyperplane is a Θ-class of edges. Removing its edges leaves two convex
halfspaces; ``side_a`` is the one holding the smallest vertex identifier.
Pair relations are decided from their definitions (transversality of sides,
common crossers), never from crossing-graph distance, so that the distance
characterisation can be tested rather than assumed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from . import _theta
from .complex import Cube, CubeComplex, _cube_table, enumerate_cubes
from .errors import (
    NotPairwiseCrossing,
    ThetaNotTransitive,
    TooFewHyperplanes,
    UnknownCube,
    UnknownHyperplane,
)

EQUAL = "equal"
TRANSVERSE = "transverse"
PARALLEL = "parallel"
STRONGLY_SEPARATED = "strongly_separated"
UBER_SEPARATED = "uber_separated"

INF = math.inf
MAX_SECTOR_FAMILY = 12


@dataclass(frozen=True)
class Hyperplane:
    id: int
    edge_class: frozenset  # frozenset of (u, v) id pairs in vertex order
    side_a: frozenset
    side_b: frozenset

    def side(self, label) -> frozenset:
        if label in (0, "a"):
            return self.side_a
        if label in (1, "b"):
            return self.side_b
        raise ValueError(f"side must be 'a'/'b' or 0/1, got {label!r}")

    def __len__(self):
        return len(self.edge_class)

    def __repr__(self):
        return f"Hyperplane({self.id}, |edges|={len(self.edge_class)}, |a|={len(self.side_a)}, |b|={len(self.side_b)})"


@dataclass
class _Geometry:
    """Cached masks and matrices for one complex."""

    sides_b: np.ndarray  # (k, n) bool
    ends: np.ndarray  # (k, n) bool: endpoints of the class edges
    transverse: np.ndarray  # (k, k) bool
    placement: np.ndarray  # (k, k) int8: side of column hyperplane holding row hyperplane; -1 if crossing/equal
    dist: np.ndarray  # (k, k) float crossing-graph distances, inf when disconnected

    @property
    def k(self):
        return self.sides_b.shape[0]


def _check_theta(X: CubeComplex):
    theta = _theta.theta_data(X)
    if not theta.transitive:
        raise ThetaNotTransitive(f"Θ-relation not transitive: {theta.violation}; input is not a median graph")
    return theta


def _geometry(X: CubeComplex) -> _Geometry:
    geo = X._cache.get("geometry")
    if geo is not None:
        return geo
    theta = _check_theta(X)
    B = theta.sides_b
    k, n = B.shape
    A = ~B
    ends = np.zeros((k, n), dtype=bool)
    for c, cls in enumerate(theta.classes):
        for i, j in cls:
            ends[c, i] = ends[c, j] = True
    Af, Bf = A.astype(np.float32), B.astype(np.float32)
    T = (Af @ Af.T > 0) & (Af @ Bf.T > 0) & (Bf @ Af.T > 0) & (Bf @ Bf.T > 0)
    np.fill_diagonal(T, False)

    Ef = ends.astype(np.float32)
    in_b = Ef @ Bf.T  # endpoints of row class lying in side b of column class
    size = ends.sum(axis=1)[:, None]
    placement = np.full((k, k), -1, dtype=np.int8)
    placement[in_b == 0] = 0
    placement[in_b == size] = 1
    placement[T] = -1
    np.fill_diagonal(placement, -1)

    g = nx.Graph()
    g.add_nodes_from(range(k))
    g.add_edges_from(zip(*np.nonzero(np.triu(T))))
    dist = np.full((k, k), INF)
    for src, lengths in nx.all_pairs_shortest_path_length(g):
        for dst, ln in lengths.items():
            dist[src, dst] = ln
    geo = _Geometry(B, ends, T, placement, dist)
    X._cache["geometry"] = geo
    return geo


def hyperplanes(X: CubeComplex) -> list[Hyperplane]:
    """Hyperplanes of ``X`` in canonical order.

    Raises :class:`ThetaNotTransitive` when the Θ-relation is not an
    equivalence relation, which certifies that ``X`` is not median.
    """
    cached = X._cache.get("hyperplanes")
    if cached is not None:
        return list(cached)
    theta = _check_theta(X)
    out = []
    for c, cls in enumerate(theta.classes):
        b = theta.sides_b[c]
        out.append(
            Hyperplane(
                id=c,
                edge_class=frozenset((X.ids[i], X.ids[j]) for i, j in cls),
                side_a=X.to_ids(np.flatnonzero(~b)),
                side_b=X.to_ids(np.flatnonzero(b)),
            )
        )
    X._cache["hyperplanes"] = tuple(out)
    return out


def _hid(h, X: CubeComplex | None = None) -> int:
    i = h.id if isinstance(h, Hyperplane) else int(h)
    if X is not None and not 0 <= i < _geometry(X).k:
        raise UnknownHyperplane(f"no hyperplane {i}; ids run 0..{_geometry(X).k - 1}")
    return i


def _cube(X: CubeComplex, c) -> Cube:
    if isinstance(c, Cube):
        return c
    cubes = enumerate_cubes(X)
    if not 0 <= int(c) < len(cubes):
        raise UnknownCube(f"no cube {c}; indices run 0..{len(cubes) - 1}")
    return cubes[int(c)]


def side_mask(X: CubeComplex, h, side) -> np.ndarray:
    b = _geometry(X).sides_b[_hid(h, X)]
    if side in (0, "a"):
        return ~b
    if side in (1, "b"):
        return b.copy()
    raise ValueError(f"side must be 'a'/'b' or 0/1, got {side!r}")


def halfspace(X: CubeComplex, h, side) -> frozenset:
    return X.to_ids(np.flatnonzero(side_mask(X, h, side)))


def find_halfspace(X: CubeComplex, vertices: Iterable) -> tuple[int, int] | None:
    """``(hyperplane id, side)`` whose halfspace equals ``vertices``, if any."""
    m = X.mask(vertices)
    B = _geometry(X).sides_b
    hit = np.flatnonzero((B == m).all(axis=1))
    if len(hit):
        return int(hit[0]), 1
    hit = np.flatnonzero((~B == m).all(axis=1))
    if len(hit):
        return int(hit[0]), 0
    return None


# -- pair classification -------------------------------------------------------


@dataclass(frozen=True)
class PairClass:
    h1: int
    h2: int
    relation: str
    crossing_distance: float
    facing: tuple | None = None  # (side of h1, side of h2) that are disjoint

    @property
    def nested(self) -> tuple | None:
        """``(i, j)``: side ``i`` of ``h1`` is contained in side ``j`` of ``h2``."""
        if self.facing is None:
            return None
        i, j = self.facing
        return (i, 1 - j)

    @property
    def is_parallel(self) -> bool:
        return self.relation in (PARALLEL, STRONGLY_SEPARATED, UBER_SEPARATED)

    @property
    def is_strongly_separated(self) -> bool:
        return self.relation in (STRONGLY_SEPARATED, UBER_SEPARATED)

    def as_dict(self) -> dict:
        out = {
            "ids": [self.h1, self.h2],
            "class": self.relation,
            "crossing_distance": _num(self.crossing_distance),
        }
        if self.facing is not None:
            out["nested"] = {"h1_side": "ab"[self.nested[0]], "h2_side": "ab"[self.nested[1]]}
        return out


def _num(x):
    return "inf" if x == INF else int(x)


def _relation(geo: _Geometry, i: int, j: int) -> str:
    T = geo.transverse
    if i == j:
        return EQUAL
    if T[i, j]:
        return TRANSVERSE
    if (T[i] & T[j]).any():
        return PARALLEL
    k1 = np.flatnonzero(T[i])
    k2 = np.flatnonzero(T[j])
    if len(k1) and len(k2) and T[np.ix_(k1, k2)].any():
        return STRONGLY_SEPARATED
    return UBER_SEPARATED


def classify_pair(X: CubeComplex, h1, h2) -> PairClass:
    geo = _geometry(X)
    i, j = _hid(h1, X), _hid(h2, X)
    rel = _relation(geo, i, j)
    facing = None
    if rel not in (EQUAL, TRANSVERSE):
        # placement[i, j] is the side of j holding hyperplane i; the facing
        # (disjoint) halfspaces are the sides away from the other hyperplane
        facing = (1 - int(geo.placement[j, i]), 1 - int(geo.placement[i, j]))
    return PairClass(i, j, rel, float(geo.dist[i, j]), facing)


def classify_all(X: CubeComplex) -> list[PairClass]:
    k = _geometry(X).k
    return [classify_pair(X, i, j) for i, j in combinations(range(k), 2)]


# -- crossing graph -------------------------------------------------------------


@dataclass(frozen=True)
class CrossingGraph:
    nodes: tuple
    adjacency: frozenset  # frozenset of (i, j) with i < j
    distances: np.ndarray  # float, inf when disconnected

    def distance(self, i, j) -> float:
        return float(self.distances[_hid(i), _hid(j)])

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from(self.adjacency)
        return g

    def as_dict(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "edges": [list(e) for e in sorted(self.adjacency)],
            "distances": [[_num(x) for x in row] for row in self.distances],
        }


def crossing_graph(X: CubeComplex) -> CrossingGraph:
    geo = _geometry(X)
    pairs = frozenset((int(a), int(b)) for a, b in zip(*np.nonzero(np.triu(geo.transverse))))
    d = geo.dist.copy()
    d.setflags(write=False)
    return CrossingGraph(tuple(range(geo.k)), pairs, d)


# -- cubes and free faces -----------------------------------------------------


def free_faces(X: CubeComplex) -> list[Cube]:
    """Cubes whose only properly containing cube is a single maximal cube.

    These are the codimension-one faces through which a complex could be
    collapsed. ``X`` has none of them exactly when every non-maximal cube
    lies in at least two maximal cubes. Faces touching non-interior vertices
    carry ``boundary_affected=True``.
    """
    table = _cube_table(X)
    return [table.cubes[k] for k, above in enumerate(table.containing) if len(above) == 1]


def maximal_cubes(X: CubeComplex) -> list[Cube]:
    return [c for c in enumerate_cubes(X) if c.maximal]


# -- irreducibility -----------------------------------------------------------


@dataclass(frozen=True)
class Irreducibility:
    irreducible: bool
    parts: tuple | None = None  # two hyperplane families when reducible

    def __bool__(self):
        return self.irreducible


def is_irreducible(X: CubeComplex) -> Irreducibility:
    """Reducible iff the crossing graph is a join (its complement is disconnected)."""
    geo = _geometry(X)
    if geo.k < 2:
        raise TooFewHyperplanes(f"need at least 2 hyperplanes, found {geo.k}")
    comp = nx.complement(crossing_graph(X).graph())
    parts = sorted((sorted(c) for c in nx.connected_components(comp)), key=lambda c: c[0])
    if len(parts) == 1:
        return Irreducibility(True)
    first = frozenset(parts[0])
    rest = frozenset(h for p in parts[1:] for h in p)
    return Irreducibility(False, (first, rest))


# -- sectors ------------------------------------------------------------------


@dataclass(frozen=True)
class SectorAssignment:
    family: tuple
    signatures: dict  # signature tuple -> frozenset of vertex ids
    contained_hyperplanes: dict  # signature tuple -> tuple of hyperplane ids
    boundary_affected: dict  # signature tuple -> bool

    def bearing(self) -> list:
        return [s for s, hs in self.contained_hyperplanes.items() if hs]

    def singletons(self) -> list:
        return [s for s, vs in self.signatures.items() if len(vs) == 1]

    def opposite_bearing_pairs(self) -> list:
        bearing = set(self.bearing())
        out = []
        for s in sorted(bearing):
            t = tuple(1 - b for b in s)
            if t in bearing and s < t:
                out.append((s, t))
        return out


def sectors(X: CubeComplex, family: Sequence) -> SectorAssignment:
    """Split the vertices by their sides of pairwise crossing hyperplanes.

    A hyperplane outside the family is contained in a sector when every
    endpoint of its edge class lies in that sector.
    """
    geo = _geometry(X)
    fam = tuple(_hid(h, X) for h in family)
    if len(set(fam)) != len(fam):
        raise NotPairwiseCrossing("family contains a repeated hyperplane")
    if len(fam) > MAX_SECTOR_FAMILY:
        raise NotPairwiseCrossing(f"family larger than {MAX_SECTOR_FAMILY}")
    for a, b in combinations(fam, 2):
        if not geo.transverse[a, b]:
            raise NotPairwiseCrossing(f"hyperplanes {a} and {b} do not cross")
    bits = geo.sides_b[list(fam)].T.astype(np.int64)  # (n, len(fam))
    weights = 1 << np.arange(len(fam))[::-1]
    codes = bits @ weights
    others = [h for h in range(geo.k) if h not in fam]
    sigs, contained, boundary = {}, {}, {}
    for code in range(1 << len(fam)):
        sig = tuple((code >> (len(fam) - 1 - t)) & 1 for t in range(len(fam)))
        inside = codes == code
        sigs[sig] = X.to_ids(np.flatnonzero(inside))
        held = [h for h in others if not (geo.ends[h] & ~inside).any()]
        contained[sig] = tuple(held)
        boundary[sig] = bool(inside.any() and not X.interior[inside].all())
    return SectorAssignment(fam, sigs, contained, boundary)


# -- cube separation ------------------------------------------------------------


def cube_pair_separates(X: CubeComplex, C: Cube | int, Cp: Cube | int) -> tuple[int, int] | None:
    """Two hyperplanes separated by every hyperplane dual to an edge of ``C ∪ C'``.

    Returns the lexicographically first such pair ``(h, h')`` or ``None``.
    """
    C, Cp = _cube(X, C), _cube(X, Cp)
    geo = _geometry(X)
    H = sorted(C.theta_classes | Cp.theta_classes)
    candidates = [h for h in range(geo.k) if h not in H]
    if not H:
        return (candidates[0], candidates[1]) if len(candidates) >= 2 else None
    place = geo.placement[np.ix_(candidates, H)]  # -1 when crossing
    table: dict[tuple, int] = {}
    for row, h in enumerate(candidates):
        if (place[row] < 0).any():
            continue
        table.setdefault(tuple(int(s) for s in place[row]), h)
    best = None
    for sig, h in table.items():
        opp = tuple(1 - s for s in sig)
        hp = table.get(opp)
        if hp is not None:
            pair = (min(h, hp), max(h, hp))
            if best is None or pair < best:
                best = pair
    return best


def separating_hyperplanes(X: CubeComplex, x, y) -> list[int]:
    geo = _geometry(X)
    i, j = X.idx(x), X.idx(y)
    return [int(h) for h in np.flatnonzero(geo.sides_b[:, i] != geo.sides_b[:, j])]


# -- depth --------------------------------------------------------------------


@dataclass(frozen=True)
class Depth:
    depth_a: int
    depth_b: int
    boundary_affected: bool

    def __iter__(self):
        yield self.depth_a
        yield self.depth_b


def halfspace_depth(X: CubeComplex, h) -> Depth:
    """Per side, the largest hop distance from a vertex to the class endpoints on that side."""
    geo = _geometry(X)
    i = _hid(h, X)
    out = []
    for side in (~geo.sides_b[i], geo.sides_b[i]):
        carrier = np.flatnonzero(side & geo.ends[i])
        members = np.flatnonzero(side)
        out.append(int(X.dist[np.ix_(members, carrier)].min(axis=1).max()))
    return Depth(out[0], out[1], X.has_window)
