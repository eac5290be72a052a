"""Automorphisms, finite acting groups and the scans built on them.

Maps may be partial (a window of an infinite action); anything computed from
vertices outside the declared domain is flagged ``boundary_affected`` rather
than treated as a failure. Composition is right to left: ``compose(g, h)``
sends ``v`` to ``g(h(v))``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

from . import _theta
from .bridges import bridge
from .complex import CubeComplex, _cube_table, cut_targets, vertex_key
from .errors import (
    DomainTooSmall,
    NotAdjacencyPreserving,
    NotDoubleSkewered,
    NotInjective,
    NotUberSeparated,
    Overflow,
    UnknownEndpoint,
)
from .hyperplanes import UBER_SEPARATED, _cube, _geometry, _hid, classify_pair, cube_pair_separates, maximal_cubes

HYPOTHESIS_LABEL = "hypothesis witness"
TABLE_LIMIT = 2000


def resolve_id(X: CubeComplex, raw):
    """Match ``raw`` to a vertex id, accepting the string form of integer ids."""
    if raw in X.index:
        return raw
    if isinstance(raw, str):
        try:
            as_int = int(raw)
        except ValueError:
            pass
        else:
            if as_int in X.index:
                return as_int
    raise UnknownEndpoint(f"unknown vertex {raw!r}")


# -- automorphisms -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Automorphism:
    vertex_map: dict
    perm: np.ndarray  # index -> image index, -1 outside the domain
    hyperplane_map: dict  # hyperplane id -> hyperplane id, where determined
    conflicts: tuple = ()  # hyperplanes whose domain edges disagree on an image

    @property
    def domain(self) -> frozenset:
        return frozenset(self.vertex_map)

    @property
    def total(self) -> bool:
        return bool((self.perm >= 0).all())

    def __call__(self, v):
        return self.vertex_map[v]

    def image(self, vertices) -> frozenset:
        return frozenset(self.vertex_map[v] for v in vertices if v in self.vertex_map)

    def as_dict(self) -> dict:
        keys = sorted(self.vertex_map, key=vertex_key)
        return {"map": {str(k): self.vertex_map[k] for k in keys}}


def _hyperplane_map(X, perm):
    theta = _theta.theta_data(X)
    if not theta.transitive:
        return {}, ()
    images: dict[int, set] = {}
    for (i, j), c in theta.edge_class.items():
        a, b = perm[i], perm[j]
        if a >= 0 and b >= 0:
            images.setdefault(c, set()).add(theta.edge_class[(min(a, b), max(a, b))])
    good = {c: next(iter(s)) for c, s in images.items() if len(s) == 1}
    bad = tuple(sorted(c for c, s in images.items() if len(s) > 1))
    return good, bad


def _from_perm(X, perm) -> Automorphism:
    vm = {X.ids[i]: X.ids[int(p)] for i, p in enumerate(perm) if p >= 0}
    perm = np.asarray(perm, dtype=np.int64)
    perm.setflags(write=False)
    hmap, bad = _hyperplane_map(X, perm)
    return Automorphism(vm, perm, hmap, bad)


def verify_automorphism(X: CubeComplex, vertex_map: dict) -> Automorphism:
    """Check that ``vertex_map`` is an injective, adjacency-preserving partial map.

    Adjacency is checked in both directions on the domain: adjacent pairs map
    to adjacent pairs and non-adjacent pairs to non-adjacent pairs.
    """
    if not vertex_map:
        raise DomainTooSmall("map is empty")
    perm = np.full(X.n, -1, dtype=np.int64)
    for src, dst in vertex_map.items():
        perm[X.idx(resolve_id(X, src))] = X.idx(resolve_id(X, dst))
    dom = np.flatnonzero(perm >= 0)
    img = perm[dom]
    if len(np.unique(img)) != len(img):
        vals, counts = np.unique(img, return_counts=True)
        raise NotInjective(f"vertex {X.ids[vals[counts > 1][0]]!r} is hit twice")
    A = X.dist[np.ix_(dom, dom)] == 1
    B = X.dist[np.ix_(img, img)] == 1
    if not np.array_equal(A, B):
        r, c = np.argwhere(A != B)[0]
        u, v = X.ids[dom[r]], X.ids[dom[c]]
        what = "adjacent" if A[r, c] else "non-adjacent"
        raise NotAdjacencyPreserving(f"{what} pair ({u!r}, {v!r}) maps to ({X.ids[img[r]]!r}, {X.ids[img[c]]!r})")
    return _from_perm(X, perm)


def identity(X: CubeComplex) -> Automorphism:
    return _from_perm(X, np.arange(X.n))


def compose(X: CubeComplex, g: Automorphism, h: Automorphism) -> Automorphism:
    """``g ∘ h`` on the vertices where both steps are defined."""
    hp = h.perm
    out = np.where(hp >= 0, g.perm[np.maximum(hp, 0)], -1)
    return _from_perm(X, out)


def inverse(X: CubeComplex, g: Automorphism) -> Automorphism:
    out = np.full(X.n, -1, dtype=np.int64)
    dom = np.flatnonzero(g.perm >= 0)
    out[g.perm[dom]] = dom
    return _from_perm(X, out)


def power(X: CubeComplex, g: Automorphism, k: int) -> Automorphism:
    base = g if k >= 0 else inverse(X, g)
    out = identity(X)
    for _ in range(abs(k)):
        out = compose(X, base, out)
    return out


# -- halfspace images and double skewering --------------------------------------


def _side_mask(X, hs):
    h, s = hs
    b = _geometry(X).sides_b[_hid(h, X)]
    return b.copy() if int(s) else ~b


def image_halfspace(X: CubeComplex, g: Automorphism, hs) -> tuple[tuple[int, int], bool]:
    """``g`` applied to the halfspace ``(h, side)``.

    Returns ``((g·h, side), boundary_affected)``; the flag is set when part of
    the halfspace lies outside the domain of ``g``.
    """
    h, s = _hid(hs[0], X), int(hs[1])
    if h not in g.hyperplane_map:
        raise DomainTooSmall(f"domain of the map meets no edge of hyperplane {h}")
    gh = g.hyperplane_map[h]
    mask = _side_mask(X, (h, s))
    dom = g.perm >= 0
    images = g.perm[mask & dom]
    sides = _geometry(X).sides_b[gh][images]
    if sides.all():
        side = 1
    elif not sides.any():
        side = 0
    else:
        raise NotAdjacencyPreserving(f"map splits halfspace ({h}, {s}) across hyperplane {gh}")
    return (gh, side), bool((mask & ~dom).any())


@dataclass(frozen=True)
class SkewerVerdict:
    holds: bool
    image: tuple  # g applied to the first halfspace
    boundary_affected: bool

    def __bool__(self):
        return self.holds


def double_skewers(X: CubeComplex, g: Automorphism, h1_side, h2_side) -> SkewerVerdict:
    """Whether ``h1 ⊂ h2 ⊂ g·h1`` as vertex sets of the window."""
    m1, m2 = _side_mask(X, h1_side), _side_mask(X, h2_side)
    img, boundary = image_halfspace(X, g, h1_side)
    mg = _side_mask(X, img)
    holds = bool(not (m1 & ~m2).any() and not (m2 & ~mg).any())
    return SkewerVerdict(holds, img, boundary)


# -- checkpoint systems ---------------------------------------------------------


@dataclass(frozen=True)
class CheckpointSystem:
    mover: Automorphism
    halfspace: tuple
    base_checkpoint: frozenset
    translates: dict  # index -> frozenset of vertex ids
    error_constant: int
    overlaps: tuple = ()  # pairs of indices whose translates meet

    @property
    def lam(self) -> frozenset:
        return frozenset().union(*self.translates.values())

    @property
    def index_map(self) -> dict:
        out: dict = {}
        for i in sorted(self.translates):
            for v in self.translates[i]:
                out.setdefault(v, []).append(i)
        return {v: tuple(ix) for v, ix in out.items()}

    def replace(self, i: int, vertices) -> "CheckpointSystem":
        """Copy with translate ``i`` swapped for ``vertices``."""
        tr = dict(self.translates)
        tr[i] = frozenset(vertices)
        return CheckpointSystem(self.mover, self.halfspace, self.base_checkpoint, tr,
                                self.error_constant, _overlaps(tr))

    def as_dict(self) -> dict:
        return {
            "halfspace": list(self.halfspace),
            "error_constant": self.error_constant,
            "base_checkpoint": sorted(self.base_checkpoint, key=vertex_key),
            "translates": {str(i): sorted(s, key=vertex_key) for i, s in sorted(self.translates.items())},
            "overlaps": [list(p) for p in self.overlaps],
            "map": self.mover.as_dict()["map"],
        }


def _overlaps(translates):
    keys = sorted(translates)
    return tuple((a, b) for k, a in enumerate(keys) for b in keys[k + 1:] if translates[a] & translates[b])


def _translate(X, g, base, i):
    gi = power(X, g, i)
    if any(v not in gi.vertex_map for v in base):
        return None
    return gi.image(base)


def build_checkpoint_system(X: CubeComplex, g: Automorphism, h1_side, index_range=None,
                            L: int = 1) -> CheckpointSystem:
    """Translates ``g^i B`` of the bridge ``B`` between ``h1`` and ``g·h1``.

    ``index_range`` is an inclusive pair ``(lo, hi)``; ``None`` takes every
    index whose translate stays inside the window.
    """
    h1_side = (int(h1_side[0]), int(h1_side[1]))
    if L < 0:
        raise ValueError("error constant must be non-negative")
    gh, _ = image_halfspace(X, g, h1_side)
    verdict = double_skewers(X, g, h1_side, gh)
    if not verdict or gh[0] == h1_side[0]:
        raise NotDoubleSkewered(f"halfspace {h1_side} is not carried strictly into itself (image {gh})")
    pc = classify_pair(X, h1_side[0], gh[0])
    if pc.relation != UBER_SEPARATED:
        raise NotUberSeparated(f"hyperplanes {h1_side[0]} and {gh[0]} are {pc.relation}")
    base = bridge(X, h1_side[0], gh[0]).members
    translates = {}
    if index_range is None:
        # as far as the window allows in both directions
        for step in (1, -1):
            i = 0 if step == 1 else -1
            while (t := _translate(X, g, base, i)) is not None:
                translates[i] = t
                i += step
    else:
        lo, hi = index_range
        for i in range(lo, hi + 1):
            t = _translate(X, g, base, i)
            if t is None:
                raise DomainTooSmall(f"translate {i} leaves the window")
            translates[i] = t
    translates = dict(sorted(translates.items()))
    return CheckpointSystem(g, h1_side, base, translates, int(L), _overlaps(translates))


@dataclass
class CheckpointReport:
    checked: int
    violations: list = field(default_factory=list)  # (x, y, i)

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {"checked": self.checked, "violations": [list(v) for v in self.violations]}


def verify_checkpoint_system(X: CubeComplex, cs: CheckpointSystem) -> CheckpointReport:
    """Check every geodesic obeys the checkpoints it is forced through.

    For vertices ``x, y`` with closest-point projections ``x', y'`` to the
    union of translates, a translate ``S_i`` applies when the translate
    indices of ``x'`` and of ``y'`` lie on opposite sides of ``i``, each at
    least 2 away, and ``S_i`` is at least ``L`` hops from both. Then every
    geodesic from ``x`` to ``y`` must meet ``S_i``. All projection choices
    are considered.
    """
    D = X.dist
    n = X.n
    keys = sorted(cs.translates)
    masks = {i: X.mask(cs.translates[i]) for i in keys}
    lam = np.zeros(n, dtype=bool)
    for m in masks.values():
        lam |= m
    lam_idx = np.flatnonzero(lam)
    imap = {X.idx(v): ix for v, ix in cs.index_map.items()}
    # distance from each vertex to each translate
    to_tr = {i: D[:, masks[i]].min(axis=1) for i in keys}

    # per vertex: list of (lo index, hi index, projection vertex)
    proj = []
    for x in range(n):
        d = D[x, lam_idx]
        nearest = lam_idx[d == d.min()]
        proj.append([(min(imap[p]), max(imap[p]), p) for p in nearest])

    L = cs.error_constant
    cuts = {i: np.array([cut_targets(X, x, masks[i]) for x in range(n)]) for i in keys}
    bad, checked = set(), 0
    for i in keys:
        far = to_tr[i] >= L
        below = np.zeros(n, dtype=bool)
        above = np.zeros(n, dtype=bool)
        for x in range(n):
            below[x] = any(hi <= i - 2 and far[p] for lo, hi, p in proj[x])
            above[x] = any(lo >= i + 2 and far[p] for lo, hi, p in proj[x])
        for x in np.flatnonzero(below):
            ys = np.flatnonzero(above)
            checked += len(ys)
            for y in ys[~cuts[i][x, ys]]:
                a, b = sorted((int(x), int(y)))
                bad.add((a, b, i))
    ids = X.ids
    return CheckpointReport(checked, [(ids[a], ids[b], i) for a, b, i in sorted(bad)])


# -- finite groups ---------------------------------------------------------------


@dataclass(eq=False)
class FiniteActingGroup:
    complex: CubeComplex
    generators: list  # list[Automorphism]
    perms: np.ndarray  # (order, n) vertex permutations; row 0 is the identity
    words: list  # generator word per element
    _lookup: dict = field(repr=False, default_factory=dict)
    _table: np.ndarray | None = field(repr=False, default=None)

    @property
    def order(self) -> int:
        return len(self.perms)

    def element(self, i: int) -> Automorphism:
        return _from_perm(self.complex, self.perms[i])

    def mul(self, i: int, j: int) -> int:
        """Index of ``element(i) ∘ element(j)``."""
        return self._lookup[self.perms[i][self.perms[j]].tobytes()]

    def inverse(self, i: int) -> int:
        inv = np.empty_like(self.perms[i])
        inv[self.perms[i]] = np.arange(len(inv))
        return self._lookup[inv.tobytes()]

    @property
    def table(self) -> np.ndarray:
        if self._table is None:
            if self.order > TABLE_LIMIT:
                raise Overflow(TABLE_LIMIT)
            m = self.order
            self._table = np.array([[self.mul(i, j) for j in range(m)] for i in range(m)], dtype=np.int64)
        return self._table

    def is_subgroup(self, elements) -> bool:
        s = set(elements)
        return 0 in s and all(self.mul(a, b) in s for a in s for b in s)


def group_closure(X: CubeComplex, generators, bound: int = 10_000) -> FiniteActingGroup:
    """Breadth-first closure of total automorphisms under composition and inverses."""
    gens = []
    for g in generators:
        if not isinstance(g, Automorphism):
            g = verify_automorphism(X, g)
        if not g.total:
            raise DomainTooSmall("group generators must be defined on every vertex")
        gens.append(g)
    steps = []
    for k, g in enumerate(gens):
        steps.append((g.perm, f"g{k}"))
        inv = inverse(X, g).perm
        if not np.array_equal(inv, g.perm):
            steps.append((inv, f"g{k}^-1"))
    ident = np.arange(X.n, dtype=np.int64)
    perms, words = [ident], [""]
    lookup = {ident.tobytes(): 0}
    queue = deque([0])
    while queue:
        e = queue.popleft()
        for p, name in steps:
            new = p[perms[e]]
            key = new.tobytes()
            if key in lookup:
                continue
            if len(perms) >= bound:
                raise Overflow(bound)
            lookup[key] = len(perms)
            perms.append(new)
            words.append(f"{name} {words[e]}".strip())
            queue.append(len(perms) - 1)
    return FiniteActingGroup(X, gens, np.array(perms), words, lookup)


# -- stabilisers -----------------------------------------------------------------

OBJECT_KINDS = ("hyperplane", "cube", "vertex")


def parse_object(X: CubeComplex, spec):
    """``("hyperplane", 3)``, ``"cube:0"`` or ``"vertex:1,2"`` to a normalised pair."""
    if isinstance(spec, str):
        kind, _, raw = spec.partition(":")
    else:
        kind, raw = spec
    if kind not in OBJECT_KINDS:
        raise ValueError(f"object kind must be one of {OBJECT_KINDS}, got {kind!r}")
    if kind == "vertex":
        return kind, resolve_id(X, raw)
    if kind == "hyperplane":
        return kind, _hid(raw, X)
    return kind, _cube(X, raw).index


def _object_stabiliser(G: FiniteActingGroup, obj) -> np.ndarray:
    """Boolean mask over group elements stabilising ``obj`` (fixing it, for vertices)."""
    X = G.complex
    kind, val = obj
    P = G.perms
    if kind == "vertex":
        i = X.idx(val)
        return P[:, i] == i
    if kind == "hyperplane":
        theta = _theta.theta_data(X)
        cls = theta.classes[val]
        u = np.array([e[0] for e in cls])
        v = np.array([e[1] for e in cls])
        target = set(cls)
        out = np.zeros(G.order, dtype=bool)
        for k in range(G.order):
            a, b = P[k][u], P[k][v]
            out[k] = {(min(p, q), max(p, q)) for p, q in zip(a.tolist(), b.tolist())} == target
        return out
    table = _cube_table(X)
    verts = np.array(sorted(table.index_sets[val]))
    key = set(verts.tolist())
    return np.array([set(P[k][verts].tolist()) == key for k in range(G.order)])


@dataclass(frozen=True)
class StabiliserReport:
    a: tuple
    b: tuple
    elements: tuple
    words: tuple
    closed: bool

    @property
    def order(self) -> int:
        return len(self.elements)

    def as_dict(self) -> dict:
        return {"a": list(self.a), "b": list(self.b), "order": self.order,
                "elements": list(self.words), "closed": self.closed}


def stabilizer_intersection(X: CubeComplex, G: FiniteActingGroup, a, b) -> StabiliserReport:
    a, b = parse_object(X, a), parse_object(X, b)
    both = _object_stabiliser(G, a) & _object_stabiliser(G, b)
    els = tuple(int(k) for k in np.flatnonzero(both))
    return StabiliserReport(a, b, els, tuple(G.words[k] or "id" for k in els), G.is_subgroup(els))


def criterion_scan(X: CubeComplex, G: FiniteActingGroup, order_threshold: int = 1) -> list[dict]:
    """Pairs meeting the small-stabiliser hypotheses, tagged by kind.

    ``hyperplane_pair``: two hyperplanes whose common stabiliser has order at
    most the threshold. ``cube_pair``: two maximal cubes (possibly equal)
    with a small common stabiliser that together separate a pair of
    hyperplanes. These are hypotheses only; nothing is concluded from them.
    """
    out = []
    k = _geometry(X).k
    hstab = [_object_stabiliser(G, ("hyperplane", h)) for h in range(k)]
    for h in range(k):
        for hp in range(h + 1, k):
            order = int((hstab[h] & hstab[hp]).sum())
            if order <= order_threshold:
                out.append({"kind": "hyperplane_pair", "a": h, "b": hp, "order": order,
                            "label": HYPOTHESIS_LABEL})
    cubes = maximal_cubes(X)
    cstab = {c.index: _object_stabiliser(G, ("cube", c.index)) for c in cubes}
    for C, Cp in combinations_with_replacement(cubes, 2):
        order = int((cstab[C.index] & cstab[Cp.index]).sum())
        if order > order_threshold:
            continue
        sep = cube_pair_separates(X, C, Cp)
        if sep is not None:
            out.append({"kind": "cube_pair", "a": C.index, "b": Cp.index, "order": order,
                        "separated": list(sep), "dimensions": [C.dimension, Cp.dimension],
                        "boundary_affected": C.boundary_affected or Cp.boundary_affected,
                        "label": HYPOTHESIS_LABEL})
    return out


@dataclass(frozen=True)
class WeakAcylVerdict:
    L: int
    no_pairs: bool
    max_count: int
    witness: tuple | None
    profile: dict  # fixer count -> number of vertex pairs

    def as_dict(self) -> dict:
        return {"L": self.L, "no_pairs": self.no_pairs, "max_count": self.max_count,
                "witness": list(self.witness) if self.witness else None,
                "profile": {str(k): v for k, v in sorted(self.profile.items())}}


def weak_acyl_scan(X: CubeComplex, G: FiniteActingGroup, L: int) -> WeakAcylVerdict:
    """Largest number of group elements fixing two vertices at distance at least ``L``."""
    F = (G.perms == np.arange(X.n)[None, :]).astype(np.int64)  # (order, n)
    counts = F.T @ F
    iu = np.triu_indices(X.n, k=1)
    far = X.dist[iu] >= L
    if not far.any():
        return WeakAcylVerdict(L, True, 0, None, {})
    c = counts[iu][far]
    xs, ys = iu[0][far], iu[1][far]
    best = int(c.max())
    k = int(np.flatnonzero(c == best)[0])
    vals, freq = np.unique(c, return_counts=True)
    profile = {int(v): int(f) for v, f in zip(vals, freq)}
    return WeakAcylVerdict(L, False, best, (X.ids[xs[k]], X.ids[ys[k]]), profile)
