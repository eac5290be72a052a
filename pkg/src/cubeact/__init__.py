"""Hyperplanes, bridges and group actions on finite windows of CAT(0) cube complexes.

Complexes are given by their 1-skeleton (a median graph) and every derived
object is computed from graph distances.
"""
from .complex import (
    CubeComplex,
    build_complex,
    enumerate_cubes,
    geodesic_cut,
    interior_subcomplex,
    interval,
    is_convex,
    is_median_graph,
    median,
    vertex_link,
)
from .errors import CubeActError
from .hyperplanes import classify_pair, crossing_graph

__all__ = [
    "CubeActError",
    "CubeComplex",
    "build_complex",
    "classify_pair",
    "crossing_graph",
    "enumerate_cubes",
    "geodesic_cut",
    "interior_subcomplex",
    "interval",
    "is_convex",
    "is_median_graph",
    "median",
    "vertex_link",
]
