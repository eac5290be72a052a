"""Gates, bridges and the two distance checks built on them.

For parallel hyperplanes the *facing* halfspaces are the disjoint ones: the
side of each hyperplane away from the other. The bridge joins them along the
closest pairs; both checks below report every offending vertex pair instead
of a bare boolean.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .complex import (
    CubeComplex,
    _interval_mask,
    _is_convex_mask,
    cut_targets,
    gate_index,
    vertex_key,
)
from .errors import NotConvex, NotParallel, NotStronglySeparated, NotUberSeparated
from .hyperplanes import (
    EQUAL,
    STRONGLY_SEPARATED,
    TRANSVERSE,
    UBER_SEPARATED,
    classify_pair,
    side_mask,
)


def gate(X: CubeComplex, x, S) -> object:
    """Closest vertex of the convex set ``S`` to ``x``."""
    inside = X.mask(S)
    if not inside.any():
        raise NotConvex("empty set has no gate")
    if not _is_convex_mask(X, inside):
        raise NotConvex("set is not convex")
    return X.ids[gate_index(X, X.idx(x), inside)]


@dataclass(frozen=True)
class Bridge:
    h1: int
    h2: int
    sides: tuple  # (side of h1, side of h2), the disjoint facing halfspaces
    relation: str
    gate1: object
    gate2: object
    pairs: tuple  # every minimizing (y1, y2)
    members: frozenset
    width: int

    @property
    def unique(self) -> bool:
        return len(self.pairs) == 1

    def as_dict(self) -> dict:
        return {
            "h1": self.h1,
            "h2": self.h2,
            "sides": list(self.sides),
            "class": self.relation,
            "gates": [self.gate1, self.gate2],
            "width": self.width,
            "unique": self.unique,
            "minimizing_pairs": [list(p) for p in self.pairs],
            "members": sorted(self.members, key=vertex_key),
        }


def _facing(X, h1, h2):
    pc = classify_pair(X, h1, h2)
    if pc.relation in (EQUAL, TRANSVERSE):
        raise NotParallel(f"hyperplanes {pc.h1} and {pc.h2} are {pc.relation}, not parallel")
    s1, s2 = pc.facing
    return pc, side_mask(X, pc.h1, s1), side_mask(X, pc.h2, s2)


def _bridge_data(X, h1, h2):
    pc, m1, m2 = _facing(X, h1, h2)
    A, B = np.flatnonzero(m1), np.flatnonzero(m2)
    sub = X.dist[np.ix_(A, B)]
    width = int(sub.min())
    rows, cols = np.nonzero(sub == width)
    pairs = [(int(A[r]), int(B[c])) for r, c in zip(rows, cols)]
    members = np.zeros(X.n, dtype=bool)
    for a, b in pairs:
        members |= _interval_mask(X, a, b)
    return pc, m1, m2, pairs, members, width


def bridge(X: CubeComplex, h1, h2) -> Bridge:
    """Union of geodesics between closest points of the two facing halfspaces.

    ``gate1``/``gate2`` are the first minimizing pair in vertex order; for
    strongly separated pairs it is the only one.
    """
    pc, _, _, pairs, members, width = _bridge_data(X, h1, h2)
    ids = X.ids
    return Bridge(
        h1=pc.h1,
        h2=pc.h2,
        sides=pc.facing,
        relation=pc.relation,
        gate1=ids[pairs[0][0]],
        gate2=ids[pairs[0][1]],
        pairs=tuple((ids[a], ids[b]) for a, b in pairs),
        members=X.to_ids(np.flatnonzero(members)),
        width=width,
    )


@dataclass
class BridgeReport:
    h1: int
    h2: int
    relation: str
    gates: tuple
    width: int
    unique: bool
    checked: int
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "h1": self.h1,
            "h2": self.h2,
            "class": self.relation,
            "gates": list(self.gates),
            "width": self.width,
            "unique": self.unique,
            "checked": self.checked,
            "violations": [list(v) for v in self.violations],
        }


def _report(X, pc, pairs, width, checked, bad):
    ids = X.ids
    a, b = pairs[0]
    return BridgeReport(pc.h1, pc.h2, pc.relation, (ids[a], ids[b]), width, len(pairs) == 1,
                        checked, [(ids[i], ids[j]) for i, j in sorted(bad)])


def check_gate_formula(X: CubeComplex, h1, h2) -> BridgeReport:
    """Check ``d(y1,y2) = d(y1,x1) + d(x1,x2) + d(x2,y2)`` across the facing halfspaces."""
    pc, m1, m2, pairs, _, width = _bridge_data(X, h1, h2)
    if pc.relation not in (STRONGLY_SEPARATED, UBER_SEPARATED):
        raise NotStronglySeparated(f"hyperplanes {pc.h1} and {pc.h2} are only {pc.relation}")
    x1, x2 = pairs[0]
    D = X.dist
    A, B = np.flatnonzero(m1), np.flatnonzero(m2)
    lhs = D[np.ix_(A, B)]
    rhs = D[A, x1][:, None] + width + D[x2, B][None, :]
    rows, cols = np.nonzero(lhs != rhs)
    bad = [(int(A[r]), int(B[c])) for r, c in zip(rows, cols)]
    if len(pairs) != 1:
        # uniqueness is part of the claim; record the competing pairs too
        bad += [p for p in pairs[1:]]
    return _report(X, pc, pairs, width, len(A) * len(B), bad)


def check_bridge_cut(X: CubeComplex, h1, h2) -> BridgeReport:
    """Check that every geodesic between the facing halfspaces meets the bridge."""
    pc, m1, m2, pairs, members, width = _bridge_data(X, h1, h2)
    if pc.relation != UBER_SEPARATED:
        raise NotUberSeparated(f"hyperplanes {pc.h1} and {pc.h2} are only {pc.relation}")
    B = np.flatnonzero(m2)
    bad = []
    for x in np.flatnonzero(m1):
        cut = cut_targets(X, int(x), members)
        bad += [(int(x), int(y)) for y in B[~cut[B]]]
    return _report(X, pc, pairs, width, int(m1.sum()) * len(B), bad)
