"""
Tests for the global Tanner code: assembly, membership, symmetries, testers and local
correction on the q=3, d=(1,1,1) instance.
"""

import numpy as np
import pytest

from hdxcodes.services import global_code as gc
from hdxcodes.services.algebra import BudgetExceededError, ParameterError, Ring, ShapeError
from hdxcodes.services.coset_complex import build_complex
from hdxcodes.services.local_code import rs_parity_rows


class TestAssembly:
    """Tests for parity-check assembly."""

    def test_dense_rows(self, code3):
        assert code3.length == 5616
        assert code3.dense.shape == (5616, 5616)
        assert code3.dense_rows_per_edge == (1, 1, 1)

    def test_sparse_rows_have_weight_d_plus_2(self, code3):
        weights = np.diff(code3.sparse.indptr)
        assert code3.sparse.shape[0] == 5616
        assert np.all(weights == 3)
        assert code3.sparse_spans_dense

    def test_local_degrees(self, code3):
        assert code3.local_degrees(1) == (1, 1)
        assert code3.local_code(2).p == 3

    def test_degrees_validated(self, complex3):
        with pytest.raises(ParameterError):
            gc.assemble_code(complex3, (1, 3, 1))
        with pytest.raises(ParameterError):
            gc.assemble_code(complex3, (1, 1))

    def test_full_space_code(self, complex3):
        code = gc.assemble_code(complex3, (2, 2, 2))
        assert code.dense.shape[0] == 0
        result = gc.dimension(code)
        assert result.value == 5616 and result.exact


class TestMembership:
    """Tests for edge-star membership."""

    def test_constants_are_members(self, code3):
        assert gc.membership(np.full(5616, 2), code3).member

    def test_single_change_fails_three_edges(self, code3, member3, complex3):
        word = member3.copy()
        word[77] = (word[77] + 1) % 3
        result = gc.membership(word, code3)
        assert not result.member
        assert result.failing_edges == sorted(complex3.tri_edge[77].tolist())

    def test_line_membership_agrees(self, code3, member3, rng):
        assert gc.line_membership(member3, code3)
        for _ in range(10):
            w = rng.integers(0, 3, size=5616)
            assert gc.line_membership(w, code3) == gc.membership(w, code3).member

    def test_length_checked(self, code3):
        with pytest.raises(ShapeError):
            gc.membership(np.zeros(10, dtype=np.int64), code3)

    def test_dense_rows_annihilate_member(self, code3, member3):
        assert not np.any(code3.dense @ member3 % 3)
        assert not np.any(code3.sparse @ member3 % 3)


class TestDimension:
    """Tests for dimension computation."""

    def test_lower_bound_over_budget(self, fresh_code3):
        result = gc.dimension(fresh_code3, budget=10)
        assert not result.exact
        assert result.budget_flag
        assert result.value == 0
        assert result.rows == 5616
        assert fresh_code3.generator is None

    @pytest.mark.slow
    def test_exact_dimension(self, fresh_code3):
        result = gc.dimension(fresh_code3)
        assert result.exact
        assert result.value >= 4
        assert result.value + result.rank == 5616
        assert not np.any(fresh_code3.dense @ fresh_code3.generator.T % 3)

        probe = gc.min_weight_probe(fresh_code3, 1 / np.sqrt(3), budget=200, seed=0)
        assert probe.weight > 0
        assert probe.bound_vacuous
        assert gc.membership(probe.witness, fresh_code3).member


class TestSymmetries:
    """Tests for products and left translations."""

    def test_multiply(self):
        assert gc.multiply(np.array([1, 2, 2]), np.array([2, 2, 0]), 3).tolist() == [2, 1, 0]
        with pytest.raises(ShapeError):
            gc.multiply(np.zeros(2), np.zeros(3), 3)

    def test_products_land_in_degree_sum_code(self, complex3, code3, rng):
        product_code = gc.assemble_code(complex3, (2, 2, 2))
        w1, w2 = gc.random_codeword(code3, rng), gc.random_codeword(code3, rng)
        assert gc.membership(gc.multiply(w1, w2, 3), product_code).member

    def test_translation_preserves_membership(self, complex3, code3, member3):
        for g in (1, 500, 4321):
            moved = gc.translate(member3, g, code3)
            assert gc.membership(moved, code3).member
            back = gc.translate(moved, gc.inverse_index(complex3, g), code3)
            assert np.array_equal(back, member3)

    def test_left_translation_is_permutation(self, complex3):
        perm = gc.left_translation(complex3, 10)
        assert np.array_equal(np.sort(perm), np.arange(5616))

    def test_transitive(self, complex3):
        assert gc.translation_orbit_reaches(complex3, [0, 1, 2000, 5615], seed=3)


class TestTesters:
    """Tests for local pullbacks, the vertex tester and the two-query tester."""

    def test_pullbacks_pass_edge_checks(self, code3):
        assert gc.local_pullback_failures(code3) == 0

    def test_chart_round_trip(self, code3, member3):
        chart = gc.vertex_chart(5, code3)
        local = chart.pullback(member3)
        assert chart.local.contains(local)
        pushed = chart.pushforward(local, code3.length)
        assert np.array_equal(pushed[chart.triangles], local)

    def test_vertex_tester(self, code3, member3, complex3):
        assert gc.vertex_tester(member3, code3) == 0.0
        corrupted = gc.corrupt(member3, 1, seed=4, q=3)
        assert gc.vertex_tester(corrupted, code3) == pytest.approx(3 / 624)

    def test_two_query_views(self, code3, member3):
        assert gc.two_query_views(member3, code3).rejection_fraction() == 0.0
        corrupted = gc.corrupt(member3, 1, seed=5, q=3)
        views = gc.two_query_views(corrupted, code3)
        assert views.rejection_fraction() > 0.0
        assert sum(s is None for s in views.symbols) == 3

    def test_corrupt(self, member3):
        corrupted = gc.corrupt(member3, 4, seed=6, q=3)
        assert np.count_nonzero(corrupted != member3) == 4
        assert np.array_equal(gc.corrupt(member3, 4, seed=6, q=3), corrupted)
        with pytest.raises(ParameterError):
            gc.corrupt(member3, 6000, seed=6, q=3)


class TestLocalCorrection:
    """Tests for local views and the greedy correction algorithm."""

    def test_restricted_views_of_member_agree(self, code3, member3, complex3):
        views = gc.views_from_word(member3, code3, mode="restrict")
        assert not views.bottom.any()
        assert gc.disagreement(views, complex3) == 0.0

    def test_corrupted_word_gives_bottom_views(self, code3, member3, complex3):
        corrupted = gc.corrupt(member3, 1, seed=7, q=3)
        views = gc.views_from_word(corrupted, code3, mode="restrict")
        assert views.bottom.sum() == 3
        assert gc.disagreement(views, complex3) > 0.0

    def test_unknown_mode(self, code3, member3):
        with pytest.raises(ParameterError):
            gc.views_from_word(member3, code3, mode="guess")

    def test_correction_of_agreeing_views(self, code3, member3):
        views = gc.views_from_word(member3, code3, mode="restrict")
        result = gc.local_correction(views, code3)
        assert result.trace.outcome == "codeword"
        assert result.trace.steps == []
        assert np.array_equal(result.codeword, member3)

    def test_correction_trace_properties(self, code3, member3, complex3):
        corrupted = gc.corrupt(member3, 2, seed=8, q=3)
        views = gc.views_from_word(corrupted, code3, mode="restrict")
        result = gc.local_correction(views, code3)
        trace = result.trace
        assert trace.monotone
        assert trace.within_step_bound
        assert trace.initial_disagreeing == round(trace.initial_alpha * complex3.num_edges)
        assert trace.final_alpha <= trace.initial_alpha
        if trace.outcome == "codeword":
            assert gc.membership(result.codeword, code3).member

    def test_enumeration_budget(self, code3, member3):
        with pytest.raises(BudgetExceededError):
            gc.views_from_word(member3, code3, mode="nearest", budget=2)

    @pytest.mark.slow
    def test_nearest_views_recover(self, code3, member3):
        successes = 0
        for seed in range(10):
            corrupted = gc.corrupt(member3, 1 + seed % 3, seed=seed, q=3)
            views = gc.views_from_word(corrupted, code3, mode="nearest")
            result = gc.local_correction(views, code3)
            assert result.trace.monotone and result.trace.within_step_bound
            successes += result.codeword is not None and bool(np.array_equal(result.codeword, member3))
        assert successes >= 9


class TestParameters:
    """Tests for agreement-parameter arithmetic."""

    def test_vacuous_without_local_regime(self):
        params = gc.global_agreement_parameters(0.5, 0.1, None, 9.0)
        assert params["vacuous"] and params["eps"] is None

    def test_formula(self):
        params = gc.global_agreement_parameters(0.8, 1e-9, 1.0, 9.0)
        assert params["eps"] == pytest.approx(0.8**2 / 128 * (0.8 / 16) ** 3)
        assert params["hypothesis"]

    def test_small_instance_is_vacuous(self, code3):
        params = gc.agreement_parameters_for(code3, 1 / np.sqrt(3))
        assert params["vacuous"]
        assert params["D"] == pytest.approx(9.0)


@pytest.mark.slow
def test_q5_constraint_count():
    x = build_complex(Ring(5, (3, 1)))
    code = gc.assemble_code(x, (3, 3, 3))
    assert code.dense.shape == (223_200, 372_000)
    result = gc.dimension(code, budget=8000)
    assert not result.exact
    assert result.value == 148_800
    assert result.value == pytest.approx(3 * (2 / 15) * 372_000)
    assert rs_parity_rows(5, 3).shape == (1, 5)
