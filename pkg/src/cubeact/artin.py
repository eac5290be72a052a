"""Coxeter graphs, finite and FC type, and Deligne-complex balls.

A Coxeter graph has integer labels ``m(s, t) >= 2`` on its edges; a missing
edge means ``m = inf``. A subset ``T`` of generators is spherical when its
cosine form is positive definite.

Deligne balls are built from a normal-form oracle. The built-in oracle
handles right-angled graphs (every label 2), which includes edgeless graphs
and so free groups. Words are tuples of ``(generator index, +1 | -1)``.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from itertools import combinations

import networkx as nx
import numpy as np

from .complex import CubeComplex, build_complex
from .errors import BadParameters, NoOracle, NotFCType, UnknownGenerator

INF = math.inf
MINOR_TOLERANCE = 1e-9
MAX_BALL_ELEMENTS = 5000


@dataclass(frozen=True)
class CoxeterGraph:
    generators: tuple
    labels: dict  # frozenset({s, t}) -> int

    def __post_init__(self):
        if len(set(self.generators)) != len(self.generators):
            raise BadParameters("repeated generator name")
        for pair, m in self.labels.items():
            if len(pair) != 2:
                raise BadParameters(f"edge {sorted(pair)} is a loop")
            for s in pair:
                if s not in self.generators:
                    raise UnknownGenerator(f"unknown generator {s!r}")
            if isinstance(m, bool) or not isinstance(m, int) or m < 2:
                raise BadParameters(f"label on {sorted(pair)} must be an integer >= 2, got {m!r}")

    @classmethod
    def build(cls, generators, edges) -> "CoxeterGraph":
        """``edges`` holds ``(s, t, m)`` triples; repeated edges must agree."""
        labels: dict = {}
        for s, t, m in edges:
            key = frozenset((s, t))
            if key in labels and labels[key] != m:
                raise BadParameters(f"conflicting labels on {s}-{t}")
            labels[key] = m
        return cls(tuple(generators), labels)

    def m(self, s, t):
        if s == t:
            return 1
        return self.labels.get(frozenset((s, t)), INF)

    def position(self, s) -> int:
        try:
            return self.generators.index(s)
        except ValueError:
            raise UnknownGenerator(f"unknown generator {s!r}") from None

    def ordered(self, T) -> tuple:
        return tuple(sorted(set(T), key=self.position))

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.generators)
        for pair, m in self.labels.items():
            s, t = self.ordered(pair)
            g.add_edge(s, t, m=m)
        return g

    @property
    def right_angled(self) -> bool:
        return all(m == 2 for m in self.labels.values())

    def as_dict(self) -> dict:
        edges = sorted((list(self.ordered(p)) + [m] for p, m in self.labels.items()),
                       key=lambda e: (self.position(e[0]), self.position(e[1])))
        return {"generators": list(self.generators), "edges": edges}


def cosine_matrix(G: CoxeterGraph, T) -> np.ndarray:
    T = G.ordered(T)
    if not T:
        raise BadParameters("cosine matrix needs a non-empty subset")
    B = np.eye(len(T))
    for i, j in combinations(range(len(T)), 2):
        m = G.m(T[i], T[j])
        B[i, j] = B[j, i] = -1.0 if m == INF else -math.cos(math.pi / m)
    return B


def leading_minors(B: np.ndarray) -> list[float]:
    return [float(np.linalg.det(B[:k, :k])) for k in range(1, len(B) + 1)]


def is_finite_type(G: CoxeterGraph, T) -> bool:
    if not set(T):
        return True
    return all(d > MINOR_TOLERANCE for d in leading_minors(cosine_matrix(G, T)))


@dataclass(frozen=True)
class FCVerdict:
    fc: bool
    failing_clique: tuple | None = None

    def __bool__(self):
        return self.fc


def is_fc_type(G: CoxeterGraph) -> FCVerdict:
    """FC type: every clique of the graph is spherical. Reports the smallest failure."""
    for clique in nx.enumerate_all_cliques(G.graph()):
        if not is_finite_type(G, clique):
            return FCVerdict(False, G.ordered(clique))
    return FCVerdict(True)


def coxeter_diameter(G: CoxeterGraph):
    g = G.graph()
    if len(g) == 0:
        return 0
    if not nx.is_connected(g):
        return INF
    return nx.diameter(g)


def hyperplane_stabilizer_label(G: CoxeterGraph, s) -> frozenset:
    """``lk(s)``: the generators adjacent to ``s``."""
    G.position(s)
    return frozenset(G.graph().neighbors(s))


def ruth_witness(G: CoxeterGraph) -> tuple | None:
    """First pair ``(s, t)`` at distance >= 3 with disjoint links, in generator order."""
    g = G.graph()
    dist = dict(nx.all_pairs_shortest_path_length(g))
    for s, t in combinations(G.generators, 2):
        if dist[s].get(t, INF) >= 3 and not (set(g[s]) & set(g[t])):
            return (s, t)
    return None


def spherical_subsets(G: CoxeterGraph) -> list[tuple]:
    """All spherical subsets (cliques plus the empty set), by size then generator order."""
    out = [()]
    for clique in nx.enumerate_all_cliques(G.graph()):
        if is_finite_type(G, clique):
            out.append(G.ordered(clique))
    return sorted(out, key=lambda T: (len(T), [G.position(s) for s in T]))


# -- normal forms ------------------------------------------------------------------


class NormalFormOracle:
    """Interface for solving the word problem and finding coset representatives."""

    def normal_form(self, word: tuple) -> tuple:
        raise NotImplementedError

    def coset_rep(self, word: tuple, T: frozenset) -> tuple:
        """Canonical representative of ``word · A_T`` (``T`` as generator indices)."""
        raise NotImplementedError


class RightAngledOracle(NormalFormOracle):
    """Shortlex normal forms for right-angled Artin groups.

    Reduction cancels ``x ... x^-1`` whenever every letter in between commutes
    with ``x``; the lexicographically least rearrangement under commutation
    is then taken greedily. Letters are ordered by generator, positive first.
    """

    def __init__(self, G: CoxeterGraph):
        if not G.right_angled:
            raise NoOracle("the right-angled oracle needs every label equal to 2")
        n = len(G.generators)
        self.commute = np.zeros((n, n), dtype=bool)
        for pair in G.labels:
            s, t = (G.position(x) for x in pair)
            self.commute[s, t] = self.commute[t, s] = True

    def _reduce(self, word):
        out: list = []
        for g, e in word:
            k = len(out) - 1
            while k >= 0:
                h, f = out[k]
                if h == g:
                    if f == -e:
                        del out[k]
                        break
                    k = -1
                elif not self.commute[g, h]:
                    k = -1
                else:
                    k -= 1
            else:
                out.append((g, e))
                continue
            if k == -1:
                out.append((g, e))
        return out

    def _lex_least(self, word):
        rest = list(word)
        out = []
        while rest:
            best = None
            for k, (g, e) in enumerate(rest):
                if all(self.commute[g, h] for h, _ in rest[:k]):
                    key = (g, -e)
                    if best is None or key < best[0]:
                        best = (key, k)
            out.append(rest.pop(best[1]))
        return tuple(out)

    def normal_form(self, word):
        return self._lex_least(self._reduce(word))

    def coset_rep(self, word, T):
        w = list(self._reduce(word))
        changed = True
        while changed:
            changed = False
            for k in range(len(w) - 1, -1, -1):
                g = w[k][0]
                if g in T and all(self.commute[g, h] and h != g for h, _ in w[k + 1:]):
                    del w[k]
                    changed = True
                    break
        return self._lex_least(w)


def default_oracle(G: CoxeterGraph, kind: str | None = None) -> NormalFormOracle:
    """``kind`` is ``None`` (pick automatically), ``"raag"`` or ``"free"``."""
    if kind not in (None, "raag", "free"):
        raise NoOracle(f"unknown oracle {kind!r}")
    if kind == "free" and G.labels:
        raise NoOracle("the free-group oracle needs a graph without edges")
    if not G.right_angled:
        raise NoOracle("no built-in normal form for graphs with labels other than 2")
    return RightAngledOracle(G)


# -- Deligne balls -----------------------------------------------------------------


def word_str(G: CoxeterGraph, word) -> str:
    if not word:
        return "1"
    return " ".join(G.generators[g] + ("" if e > 0 else "^-1") for g, e in word)


@dataclass(frozen=True)
class DeligneBall:
    graph: CoxeterGraph
    radius: int
    cosets: tuple  # (rep word, T tuple of generator names), sorted
    edges: tuple  # (coset index, coset index, added generator)

    def vertex_id(self, k: int) -> str:
        rep, T = self.cosets[k]
        return f"{word_str(self.graph, rep)}|{','.join(T)}"

    def to_complex(self) -> CubeComplex:
        """1-skeleton window; cosets whose representative has length ``radius`` are boundary."""
        ids = [self.vertex_id(k) for k in range(len(self.cosets))]
        interior = {ids[k]: len(rep) < self.radius for k, (rep, _) in enumerate(self.cosets)}
        return build_complex(ids, [(ids[a], ids[b]) for a, b, _ in self.edges], interior)

    def sidecar(self) -> dict:
        cos = {self.vertex_id(k): {"rep": word_str(self.graph, rep), "T": list(T)}
               for k, (rep, T) in enumerate(self.cosets)}
        labels = {f"{self.vertex_id(a)} -- {self.vertex_id(b)}": t for a, b, t in self.edges}
        return {"cosets": cos, "edge_labels": labels}

    def base_link_labels(self) -> tuple[set, set]:
        """Labels seen from the base coset ``1·A_∅``: vertex labels and square label pairs."""
        base = self.cosets.index(((), ()))
        nbrs = {}
        for a, b, t in self.edges:
            if a == base:
                nbrs[b] = t
            elif b == base:
                nbrs[a] = t
        adj: dict = {}
        for a, b, _ in self.edges:
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
        pairs = set()
        for u, v in combinations(sorted(nbrs), 2):
            if (adj[u] & adj[v]) - {base}:
                pairs.add(frozenset((nbrs[u], nbrs[v])))
        return set(nbrs.values()), pairs

    def base_link_surjects(self) -> bool:
        verts, pairs = self.base_link_labels()
        edges = {p for p in self.graph.labels if is_finite_type(self.graph, p)}
        return verts == set(self.graph.generators) and pairs == edges


def deligne_ball(G: CoxeterGraph, radius: int, oracle: NormalFormOracle | str | None = None) -> DeligneBall:
    """Cosets ``a·A_T`` (``T`` spherical) whose canonical representative has length <= ``radius``.

    Edges join ``a·A_T`` to ``a·A_{T+t}`` and carry the label ``t``.
    """
    if radius < 0:
        raise BadParameters("radius must be non-negative")
    fc = is_fc_type(G)
    if not fc:
        raise NotFCType(fc.failing_clique)
    if oracle is None or isinstance(oracle, str):
        oracle = default_oracle(G, oracle)
    letters = [(g, e) for g in range(len(G.generators)) for e in (1, -1)]
    ball = {()}
    frontier = deque([()])
    while frontier:
        w = frontier.popleft()
        if len(w) == radius:
            continue
        for x in letters:
            v = oracle.normal_form(w + (x,))
            if len(v) <= radius and v not in ball:
                if len(ball) >= MAX_BALL_ELEMENTS:
                    raise BadParameters(f"ball exceeds {MAX_BALL_ELEMENTS} group elements")
                ball.add(v)
                frontier.append(v)
    subsets = spherical_subsets(G)
    pos = {T: frozenset(G.position(s) for s in T) for T in subsets}
    cosets = set()
    for w in ball:
        for T in subsets:
            cosets.add((oracle.coset_rep(w, pos[T]), T))
    order = sorted(cosets, key=lambda c: (len(c[0]), c[0], len(c[1]), [G.position(s) for s in c[1]]))
    index = {c: k for k, c in enumerate(order)}
    sph = set(subsets)
    edges = []
    for k, (rep, T) in enumerate(order):
        for t in G.generators:
            if t in T:
                continue
            U = G.ordered(set(T) | {t})
            if U in sph:
                target = (oracle.coset_rep(rep, pos[U]), U)
                edges.append((k, index[target], t))
    return DeligneBall(G, radius, tuple(order), tuple(sorted(edges)))
