"""
Tests for the coordinate embedding, affine lines and polynomial restrictions.
"""

import numpy as np
import pytest

from hdxcodes.services import global_code as gc
from hdxcodes.services.algebra import counter_rng
from hdxcodes.services.embedding import (
    EmbeddingError,
    MultiPoly,
    designated_rm_polys,
    iota,
    line_from_rep,
    line_of_edge,
    random_multipoly,
    rm_restrict,
    star_affine_dimension,
    verify_all_lines,
)


class TestLines:
    """Tests for edge stars as affine lines."""

    def test_every_edge_is_a_line(self, complex3):
        result = verify_all_lines(complex3)
        assert result == {
            "edges": 5616,
            "zero_directions": 0,
            "off_line": 0,
            "independent_directions": True,
        }

    def test_line_export(self, complex3):
        line = line_of_edge(42, complex3)
        data = line.export()
        assert data["edge_id"] == 42
        assert len(data["v0"]) == len(data["dir"]) == 9
        assert data["alpha_to_triangle"] == complex3.edge_star[42].tolist()
        assert np.array_equal(line.point(0), iota(complex3.triangles[complex3.edge_star[42, 0]]))

    def test_line_from_any_triangle(self, complex3):
        x = complex3
        for t in (5, 999):
            for k in (1, 2, 3):
                line = line_from_rep(x, t, k)
                assert line.triangles[0] == t
                assert np.array_equal(line.points(), iota(x.triangles[line.triangles]))

    def test_type1_stars_are_3_dimensional(self, complex3):
        for v in complex3.vertices_of_type(1)[::13]:
            assert star_affine_dimension(complex3, int(v)) == 3


class TestPolynomials:
    """Tests for multivariate polynomials over F_q."""

    def test_exponent_range(self):
        with pytest.raises(EmbeddingError):
            MultiPoly(3, 2, {(3, 0): 1})
        with pytest.raises(EmbeddingError):
            MultiPoly(3, 2, {(1,): 1})

    def test_arithmetic(self):
        x0 = MultiPoly.variable(5, 2, 0)
        x1 = MultiPoly.variable(5, 2, 1)
        f = x0.combine(x1, 2, 3)
        assert f.degree == 1
        assert f.evaluate(np.array([[1, 1], [2, 0]])).tolist() == [0, 4]

    def test_random_degree(self):
        f = random_multipoly(5, 9, 2, counter_rng(0, 0))
        assert f.degree <= 2

    def test_restriction_length_checked(self, complex3):
        with pytest.raises(EmbeddingError):
            rm_restrict(MultiPoly.constant(3, 4), complex3)

    def test_designated_restrictions_are_codewords(self, complex3, code3):
        words = [rm_restrict(p, complex3) for p in designated_rm_polys(complex3)]
        assert len(words) == 4
        assert all(gc.membership(w, code3).member for w in words)

    def test_degree_one_restrictions_are_codewords(self, complex3, code3):
        rng = counter_rng(8, 0)
        for _ in range(5):
            w = rm_restrict(random_multipoly(3, 9, 1, rng), complex3)
            assert gc.line_membership(w, code3)
