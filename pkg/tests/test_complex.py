"""
Tests for group generation and the coset complex tables (q=3, n=1 instance).
"""

import numpy as np
import pytest

from hdxcodes.services.algebra import BudgetExceededError, ParameterError, Ring
from hdxcodes.services.coset_complex import (
    TYPES,
    SubgroupKind,
    build_complex,
    canonical_coset_rep,
    det_filter_keys,
    deserialize,
    element_keys,
    expected_link_gram,
    generate_group,
    link_graph,
    next_type,
    prev_type,
    serialize,
    sl3_order,
    subgroup_elements,
    vertex_link_biadjacency,
)


class TestTypes:
    def test_cyclic_neighbours(self):
        assert [next_type(i) for i in TYPES] == [2, 3, 1]
        assert [prev_type(i) for i in TYPES] == [3, 1, 2]

    def test_subgroup_kind_validation(self):
        with pytest.raises(ParameterError):
            SubgroupKind("L", 1)
        with pytest.raises(ParameterError):
            SubgroupKind("K", 4)

    @pytest.mark.parametrize("family,size", [("H", 3), ("K", 27)])
    def test_subgroup_sizes(self, ring3, family, size):
        for i in TYPES:
            elements = subgroup_elements(ring3, SubgroupKind(family, i))
            assert np.unique(element_keys(elements, 3)).size == size
            assert np.all(ring3.det(elements) == ring3.one())


class TestGroup:
    """Tests for the BFS closure."""

    def test_sl3_order(self):
        assert sl3_order(3, 1) == 5616
        assert sl3_order(5, 1) == 372_000

    def test_closure_is_sl3(self, complex3):
        assert complex3.num_triangles == 5616
        assert complex3.group.expected_order == 5616

    def test_closure_equals_det_filter(self, complex3, ring3):
        keys = det_filter_keys(ring3)
        assert np.array_equal(keys, complex3.group.keys)

    def test_det_filter_budget(self, ring3):
        with pytest.raises(BudgetExceededError):
            det_filter_keys(ring3, budget=1000)

    def test_closure_budget(self, ring3):
        with pytest.raises(BudgetExceededError) as exc:
            generate_group(ring3, budget=100)
        assert exc.value.size_report["budget"] == 100

    def test_keys_sorted_and_unique(self, complex3):
        keys = complex3.group.keys
        assert np.all(np.diff(keys) > 0)

    def test_serialisation_round_trip(self, complex3):
        g = complex3.triangles[1234]
        assert np.array_equal(deserialize(serialize(g), 1), g)


class TestComplexTables:
    """Tests for face counts and incidences."""

    def test_counts(self, complex3):
        assert complex3.counts() == {"vertices": 624, "edges": 5616, "triangles": 5616}
        for i in TYPES:
            assert complex3.vertices_of_type(i).size == 208
            assert complex3.edges_of_type(i).size == 1872

    def test_star_sizes(self, complex3):
        assert complex3.vertex_star.shape == (624, 27)
        assert complex3.edge_star.shape == (5616, 3)
        assert all(len(set(row)) == 27 for row in complex3.vertex_star.tolist())
        degree = np.bincount(complex3.tri_vertex.ravel(), minlength=624)
        assert np.all(degree == 27)
        assert np.all(np.bincount(complex3.tri_edge.ravel(), minlength=5616) == 3)

    def test_vertex_edges(self, complex3):
        assert complex3.vertex_edges.shape == (624, 18)
        for v in (0, 300, 623):
            for e in complex3.vertex_edges[v]:
                assert v in complex3.edge_vertices[e]

    def test_edge_star_shares_endpoints(self, complex3):
        x = complex3
        for e in range(0, x.num_edges, 97):
            k = int(x.edge_type[e])
            others = [i for i in TYPES if i != k]
            for slot, i in enumerate(others):
                assert set(x.tri_vertex[x.edge_star[e], i - 1]) == {x.edge_vertices[e, slot]}

    def test_positions_are_consistent(self, complex3):
        x = complex3
        tri = np.arange(x.num_triangles)
        for k in TYPES:
            e = x.tri_edge[:, k - 1]
            assert np.array_equal(x.edge_star[e, x.tri_edge_pos[:, k - 1]], tri)
            v = x.tri_vertex[:, k - 1]
            assert np.array_equal(x.vertex_star[v, x.tri_star_pos[:, k - 1]], tri)

    def test_representatives_are_canonical(self, complex3, ring3):
        x = complex3
        for t in (0, 17, 2500, 5615):
            for i in TYPES:
                rep = canonical_coset_rep(x.triangles[t], SubgroupKind("K", i), ring3)
                v = x.tri_vertex[t, i - 1]
                assert np.array_equal(rep, x.triangles[x.vertex_rep[v]])
                rep = canonical_coset_rep(x.triangles[t], SubgroupKind("H", i), ring3)
                e = x.tri_edge[t, i - 1]
                assert np.array_equal(rep, x.triangles[x.edge_rep[e]])


class TestLinks:
    """Tests for vertex links and their parameterisation."""

    @pytest.mark.parametrize("q", [3, 5, 7, 11, 13])
    def test_link_gram(self, q):
        bi = link_graph(q).biadjacency
        assert np.array_equal(bi @ bi.T, expected_link_gram(q))

    def test_vertex_links_are_regular(self, complex3):
        for v in (0, 208, 416, 623):
            bi = vertex_link_biadjacency(complex3, v)
            assert bi.shape == (9, 9)
            assert np.all(bi.sum(axis=0) == 3) and np.all(bi.sum(axis=1) == 3)

    def test_networkx_export(self):
        g = link_graph(5).to_networkx()
        assert g.number_of_nodes() == 50
        assert g.number_of_edges() == 125


@pytest.mark.slow
def test_q5_census():
    x = build_complex(Ring(5, (3, 1)))
    assert x.counts() == {"vertices": 372_000 * 3 // 125, "edges": 223_200, "triangles": 372_000}
