"""Djoković–Winkler relation and the Θ-coordinates derived from it.

Edges ``uv`` and ``xy`` are Θ-related iff ``d(u,x)+d(v,y) != d(u,y)+d(v,x)``.
On median graphs Θ is an equivalence relation and its classes are the
hyperplanes. Classes are numbered by distance from vertex index 0, ties
broken by their smallest edge, so numbering follows the complex outward from
its first vertex.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

_CHUNK = 512


@dataclass
class ThetaData:
    classes: list  # class id -> sorted list of edges (i, j), i < j
    edge_class: dict  # edge -> class id
    sides_b: np.ndarray  # (k, n) bool; side_a contains vertex 0
    across: list  # vertex -> {class id: neighbour}
    bipartite: bool
    transitive: bool
    isometric: bool
    violation: tuple | None  # (e, f, g): e~f, f~g, not e~g
    packed: np.ndarray = field(repr=False, default=None)
    hashes: np.ndarray = field(repr=False, default=None)
    hash_mult: np.ndarray = field(repr=False, default=None)


def _relation(D: np.ndarray, U: np.ndarray, V: np.ndarray) -> np.ndarray:
    m = len(U)
    R = np.empty((m, m), dtype=bool)
    for s in range(0, m, _CHUNK):
        u, v = U[s : s + _CHUNK], V[s : s + _CHUNK]
        R[s : s + _CHUNK] = D[np.ix_(u, U)] + D[np.ix_(v, V)] != D[np.ix_(u, V)] + D[np.ix_(v, U)]
    return R


def _bipartite(X) -> bool:
    D = X.dist
    return all((D[i, 0] - D[j, 0]) % 2 for i, j in X.edges)


def theta_data(X) -> ThetaData:
    cached = X._cache.get("theta")
    if cached is not None:
        return cached
    data = _compute(X)
    X._cache["theta"] = data
    return data


def _compute(X) -> ThetaData:
    n = X.n
    D = X.dist
    edges = list(X.edges)
    m = len(edges)
    if m == 0:
        return ThetaData([], {}, np.zeros((0, n), dtype=bool), [dict() for _ in range(n)],
                         True, True, True, None, np.zeros((n, 1), np.uint64),
                         np.zeros(n, np.uint64), np.ones(1, np.uint64))
    U = np.array([e[0] for e in edges])
    V = np.array([e[1] for e in edges])
    R = _relation(D, U, V)
    ncomp, label = connected_components(csr_matrix(R), directed=False)

    members: list[list[int]] = [[] for _ in range(ncomp)]
    for e, c in enumerate(label):
        members[c].append(e)
    transitive = True
    violation = None
    for comp in members:
        block = R[np.ix_(comp, comp)]
        if not block.all():
            transitive = False
            a, b = np.argwhere(~block)[0]
            e, g = comp[a], comp[b]
            # shortest chain e ~ f ~ ... ~ g inside the component
            f = next((h for h in comp if R[e, h] and R[h, g]), None)
            if f is not None and violation is None:
                violation = (edges[e], edges[f], edges[g])
            elif violation is None:
                violation = (edges[e], None, edges[g])
            break

    # order classes: distance from vertex 0, then smallest edge
    d0 = D[0]

    def class_key(comp):
        dmin = min(min(d0[edges[e][0]], d0[edges[e][1]]) for e in comp)
        return (int(dmin), min(edges[e] for e in comp))

    ordered = sorted(members, key=class_key)
    classes = [sorted(edges[e] for e in comp) for comp in ordered]
    edge_class = {}
    for c, cls in enumerate(classes):
        for e in cls:
            edge_class[e] = c

    k = len(classes)
    sides_b = np.zeros((k, n), dtype=bool)
    for c, cls in enumerate(classes):
        u, v = cls[0]
        near_u = D[:, u] < D[:, v]
        sides_b[c] = ~near_u if near_u[0] else near_u
    across: list[dict] = [dict() for _ in range(n)]
    for (i, j), c in edge_class.items():
        across[i].setdefault(c, j)
        across[j].setdefault(c, i)

    bipartite = _bipartite(X)
    isometric = False
    packed = hashes = mult = None
    if bipartite and transitive:
        S = sides_b.T.astype(np.float32)
        ham = S @ (1 - S).T + (1 - S) @ S.T
        isometric = bool(np.array_equal(ham.astype(np.int64), D.astype(np.int64)))
    if isometric:
        bits = np.packbits(sides_b.T, axis=1)
        pad = (-bits.shape[1]) % 8
        if pad:
            bits = np.concatenate([bits, np.zeros((n, pad), dtype=np.uint8)], axis=1)
        packed = np.ascontiguousarray(bits).view(np.uint64)
        rng = np.random.default_rng(0x5EED)
        for _ in range(16):
            mult = rng.integers(1, 2**63, size=packed.shape[1], dtype=np.uint64) | np.uint64(1)
            hashes = (packed * mult).sum(axis=1, dtype=np.uint64)
            if len(np.unique(hashes)) == n:
                break
        else:  # pragma: no cover - astronomically unlikely
            raise RuntimeError("could not find collision-free vertex hashes")
    return ThetaData(classes, edge_class, sides_b, across, bipartite, transitive, isometric,
                     violation, packed, hashes, mult)
