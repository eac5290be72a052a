import math
from itertools import combinations

import numpy as np
import pytest

from cubeact.artin import (
    CoxeterGraph,
    RightAngledOracle,
    cosine_matrix,
    coxeter_diameter,
    deligne_ball,
    default_oracle,
    hyperplane_stabilizer_label,
    is_fc_type,
    is_finite_type,
    ruth_witness,
    spherical_subsets,
)
from cubeact.complex import interior_subcomplex, is_median_graph
from cubeact.errors import BadParameters, NoOracle, NotFCType, UnknownGenerator

import oracles

# rank <= 3 finite Coxeter groups have at most 120 elements (H3)
SMALL_CAP = 1000


def graph_from_labels(n, labels):
    gens = [f"s{i}" for i in range(n)]
    return CoxeterGraph.build(gens, [(gens[i], gens[j], m) for (i, j), m in labels.items() if m != math.inf])


def free(n):
    return CoxeterGraph.build([f"s{i}" for i in range(n)], [])


EDGE = CoxeterGraph.build(["s", "t"], [("s", "t", 2)])
PATH3 = CoxeterGraph.build(["a", "b", "c"], [("a", "b", 2), ("b", "c", 2)])
SQUARE = CoxeterGraph.build(["a", "b", "c", "d"], [("a", "b", 2), ("b", "c", 2), ("c", "d", 2), ("d", "a", 2)])
TRIANGLE = CoxeterGraph.build(["a", "b", "c"], [("a", "b", 2), ("b", "c", 2), ("a", "c", 2)])


class TestGraphs:
    def test_validation(self):
        with pytest.raises(BadParameters):
            CoxeterGraph.build(["s", "t"], [("s", "t", 1)])
        with pytest.raises(BadParameters):
            CoxeterGraph.build(["s", "t"], [("s", "t", 2.5)])
        with pytest.raises(BadParameters):
            CoxeterGraph.build(["s", "t"], [("s", "t", True)])
        with pytest.raises(BadParameters):
            CoxeterGraph.build(["s", "t"], [("s", "t", 2), ("t", "s", 3)])
        with pytest.raises(UnknownGenerator):
            CoxeterGraph.build(["s"], [("s", "u", 3)])
        with pytest.raises(BadParameters):
            CoxeterGraph.build(["s", "s"], [])

    def test_round_trip_dict(self):
        d = PATH3.as_dict()
        assert d == {"generators": ["a", "b", "c"], "edges": [["a", "b", 2], ["b", "c", 2]]}
        assert CoxeterGraph.build(d["generators"], d["edges"]) == PATH3


class TestFiniteType:
    def test_cosine_a2(self):
        G = CoxeterGraph.build(["s", "t"], [("s", "t", 3)])
        assert np.allclose(cosine_matrix(G, ["t", "s"]), [[1, -0.5], [-0.5, 1]])
        with pytest.raises(BadParameters):
            cosine_matrix(G, [])

    def test_examples(self):
        assert is_finite_type(EDGE, ["s", "t"])
        assert not is_finite_type(free(2), ["s0", "s1"])
        affine = CoxeterGraph.build(["a", "b", "c"], [("a", "b", 3), ("b", "c", 3), ("a", "c", 3)])
        assert not is_finite_type(affine, "abc")
        h3 = CoxeterGraph.build(["a", "b", "c"], [("a", "b", 5), ("b", "c", 3), ("a", "c", 2)])
        assert is_finite_type(h3, "abc")
        assert not is_finite_type(CoxeterGraph.build("abc", [("a", "b", 5), ("b", "c", 3)]), "abc")
        assert is_finite_type(free(3), [])

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_against_group_order(self, n):
        cache = {}
        for labels in oracles.all_labelings(n):
            # rank <= 3 groups depend only on the label multiset
            key = tuple(sorted(labels.values()))
            if key not in cache:
                cache[key] = oracles.coxeter_order(n, labels, cap=SMALL_CAP) is not None
            G = graph_from_labels(n, labels)
            assert is_finite_type(G, G.generators) == cache[key], labels

    def test_subsets_and_fc(self):
        assert spherical_subsets(PATH3) == [(), ("a",), ("b",), ("c",), ("a", "b"), ("b", "c")]
        assert is_fc_type(PATH3)
        affine = CoxeterGraph.build(["a", "b", "c"], [("a", "b", 3), ("b", "c", 3), ("a", "c", 3)])
        v = is_fc_type(affine)
        assert not v and v.failing_clique == ("a", "b", "c")


class TestGraphInvariants:
    def test_diameter(self):
        assert coxeter_diameter(PATH3) == 2
        assert coxeter_diameter(free(2)) == math.inf
        assert coxeter_diameter(CoxeterGraph((), {})) == 0

    def test_links_and_ruth(self):
        P5 = CoxeterGraph.build("abcde", [(x, y, 2) for x, y in zip("abcd", "bcde")])
        assert hyperplane_stabilizer_label(P5, "c") == {"b", "d"}
        assert ruth_witness(P5) == ("a", "d")
        assert ruth_witness(SQUARE) is None
        assert ruth_witness(free(2)) == ("s0", "s1")
        with pytest.raises(UnknownGenerator):
            hyperplane_stabilizer_label(P5, "z")


class TestNormalForms:
    def test_free_reduction_and_commutation(self):
        o = RightAngledOracle(EDGE)
        s, S, t, T = (0, 1), (0, -1), (1, 1), (1, -1)
        assert o.normal_form((s, t, S)) == (t,)
        assert o.normal_form((t, s)) == (s, t)
        assert o.normal_form((s, S, t, T)) == ()

    def test_free_group_is_just_reduction(self):
        o = RightAngledOracle(free(2))
        word = ((1, 1), (0, 1), (0, -1), (0, -1), (1, -1))
        assert o.normal_form(word) == oracles.free_reduce(oracles.free_reduce(word))

    def test_idempotent(self):
        o = RightAngledOracle(SQUARE)
        rng = np.random.default_rng(3)
        for _ in range(200):
            w = tuple((int(g), int(e)) for g, e in zip(rng.integers(0, 4, 8), rng.choice([-1, 1], 8)))
            nf = o.normal_form(w)
            assert o.normal_form(nf) == nf and len(nf) <= len(w)

    def test_coset_rep(self):
        o = RightAngledOracle(EDGE)
        s, t = (0, 1), (1, 1)
        assert o.coset_rep((s, t), frozenset({1})) == (s,)
        assert o.coset_rep((s, t), frozenset({0})) == (t,)
        assert o.coset_rep((s, t), frozenset({0, 1})) == ()

    def test_no_oracle(self):
        A2 = CoxeterGraph.build(["s", "t"], [("s", "t", 3)])
        with pytest.raises(NoOracle):
            default_oracle(A2)
        with pytest.raises(NoOracle):
            default_oracle(EDGE, "free")
        with pytest.raises(NoOracle):
            default_oracle(EDGE, "magic")


class TestDeligne:
    @pytest.mark.parametrize("length", [0, 1, 2])
    def test_free_against_coset_enumeration(self, length):
        G = free(2)
        D = deligne_ball(G, length)
        verts, edges = oracles.free_group_cosets(2, length)
        ours = {(rep, tuple(G.position(s) for s in T)) for rep, T in D.cosets}
        assert ours == verts
        ours_edges = {frozenset({(D.cosets[a][0], tuple(G.position(s) for s in D.cosets[a][1])),
                                 (D.cosets[b][0], tuple(G.position(s) for s in D.cosets[b][1]))})
                      for a, b, _ in D.edges}
        assert ours_edges == edges

    def test_z2(self):
        D = deligne_ball(EDGE, 1)
        X = D.to_complex()
        assert (X.n, len(X.edges)) == (12, 16)
        assert is_median_graph(X) and D.base_link_surjects()

    @pytest.mark.parametrize("G", [free(2), EDGE, PATH3, SQUARE], ids=["free", "edge", "path", "square"])
    def test_two_dimensional_balls_are_median(self, G):
        for length in (1, 2):
            D = deligne_ball(G, length)
            assert is_median_graph(D.to_complex()) and D.base_link_surjects()

    def test_three_clique_truncation(self):
        # cutting by representative length is not median-closed once a 3-cube appears;
        # the interior survives one radius longer than the whole ball
        assert is_median_graph(deligne_ball(TRIANGLE, 1).to_complex())
        v = is_median_graph(deligne_ball(TRIANGLE, 2).to_complex())
        assert not v and v.witness == ("a b^-1|", "a c^-1|", "b^-1 c^-1|")
        assert is_median_graph(interior_subcomplex(deligne_ball(TRIANGLE, 2).to_complex()))
        assert not is_median_graph(interior_subcomplex(deligne_ball(TRIANGLE, 3).to_complex()))

    def test_labels_and_ids(self):
        D = deligne_ball(EDGE, 1)
        side = D.sidecar()
        assert "1|" in side["cosets"] and "1|s,t" in side["cosets"]
        assert set(side["edge_labels"].values()) == {"s", "t"}
        assert D.vertex_id(0) == "1|"
        assert any(k.startswith("s^-1|") for k in side["cosets"])

    def test_errors(self):
        affine = CoxeterGraph.build(["a", "b", "c"], [("a", "b", 3), ("b", "c", 3), ("a", "c", 3)])
        with pytest.raises(NotFCType):
            deligne_ball(affine, 1)
        with pytest.raises(NoOracle):
            deligne_ball(CoxeterGraph.build(["s", "t"], [("s", "t", 3)]), 1)
        with pytest.raises(BadParameters):
            deligne_ball(EDGE, -1)

    def test_free_sizes(self):
        assert [deligne_ball(free(2), k).to_complex().n for k in (1, 2, 3)] == [11, 35, 107]

    def test_link_pairs_in_combinations(self):
        verts, pairs = deligne_ball(SQUARE, 1).base_link_labels()
        assert verts == set("abcd")
        assert pairs == {frozenset(p) for p in combinations("abcd", 2)} - {frozenset("ac"), frozenset("bd")}
