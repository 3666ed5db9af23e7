"""
Tests for Reed-Solomon components and the local codes C_{dx,dy}.
"""

import numpy as np
import pytest

from hdxcodes.services.algebra import BudgetExceededError, ParameterError, counter_rng
from hdxcodes.services.local_code import (
    RSSpec,
    binomial_matrix_rank,
    build_local_code,
    coeff_support_check,
    interpolate_univariate,
    local_agreement_parameters,
    local_constraint_matrix,
    local_dim_formula,
    point_index,
    rs_encode,
    rs_parity_rows,
    rs_sparse_check,
    rs_window_checks,
    skew_line_indices,
    skew_line_points,
    univariate_degree,
)


class TestReedSolomon:
    """Tests for RS(q, d) encoders and parity checks."""

    def test_degree_range(self):
        with pytest.raises(ParameterError):
            RSSpec(5, 5)
        with pytest.raises(ParameterError):
            RSSpec(5, -1)

    def test_relative_distance(self):
        assert RSSpec(5, 2).relative_distance == pytest.approx(3 / 5)

    def test_parity_rows_annihilate_codewords(self):
        rows = rs_parity_rows(7, 2)
        assert rows.shape == (4, 7)
        rng = counter_rng(1, 0)
        words = np.stack([RSSpec(7, 2).encode(rng.integers(0, 7, size=3)) for _ in range(50)])
        assert not np.any(words @ rows.T % 7)

    def test_parity_rows_reject_high_degree(self):
        word = rs_encode([0, 0, 0, 1], 7)
        assert np.any(rs_parity_rows(7, 2) @ word % 7)

    def test_full_space_has_no_rows(self):
        assert rs_parity_rows(5, 4).shape == (0, 5)
        assert rs_parity_rows(5, 7).shape == (0, 5)

    @pytest.mark.parametrize("q,d", [(5, 1), (7, 3), (11, 0), (13, 6)])
    def test_window_checks_have_weight_d_plus_2(self, q, d):
        checks = rs_window_checks(q, d)
        assert checks.shape == (q - d - 1, q)
        assert np.all(np.count_nonzero(checks, axis=1) == d + 2)
        rng = counter_rng(q, d)
        words = np.stack([rs_encode(rng.integers(0, q, size=d + 1), q) for _ in range(100)])
        assert not np.any(words @ checks.T % q)

    def test_sparse_check_support_validation(self):
        with pytest.raises(ParameterError):
            rs_sparse_check(5, 1, [0, 1])
        with pytest.raises(ParameterError):
            rs_sparse_check(5, 1, [0, 0, 1])

    def test_univariate_degree(self):
        assert univariate_degree(rs_encode([1, 2, 3], 7), 7) == 2
        assert univariate_degree(np.zeros(7, dtype=np.int64), 7) == -1

    def test_interpolation_inverts_encoding(self):
        coeffs = np.array([4, 0, 1, 6, 0, 0, 0])
        assert np.array_equal(interpolate_univariate(rs_encode(coeffs, 7), 7), coeffs)


class TestLocalCode:
    """Tests for C_{dx,dy} construction and membership."""

    def test_formula(self):
        assert local_dim_formula(1, 1) == 8
        assert local_dim_formula(2, 1) == 15
        assert local_dim_formula(0, 0) == 1

    def test_dimension_p5(self):
        spec = build_local_code(5, 1, 1)
        assert spec.dim == 8
        assert spec.formula_checked
        assert spec.basis_eval.shape == (8, 125)

    @pytest.mark.parametrize("p", [5, 7])
    def test_rate_sweep(self, p):
        for d_x in range(p - 1):
            for d_y in range(p - 1 - d_x):
                if d_x + d_y + 2 > p:
                    continue
                spec = build_local_code(p, d_x, d_y)
                assert spec.dim == local_dim_formula(d_x, d_y), (p, d_x, d_y)

    def test_evaluation_method_agrees(self):
        graded = build_local_code(5, 2, 1)
        evaluation = build_local_code(5, 2, 1, method="evaluation")
        assert graded.dim == evaluation.dim == 15
        assert evaluation.syndrome_ok(graded.basis_eval).all()

    @pytest.mark.slow
    def test_evaluation_method_agrees_p11(self):
        graded = build_local_code(11, 2, 2)
        evaluation = build_local_code(11, 2, 2, method="evaluation")
        assert graded.dim == evaluation.dim == local_dim_formula(2, 2)
        assert evaluation.syndrome_ok(graded.basis_eval).all()

    def test_unknown_method(self):
        with pytest.raises(ParameterError):
            build_local_code(5, 1, 1, method="magic")

    def test_degree_range(self):
        with pytest.raises(ParameterError):
            build_local_code(5, 5, 0)

    def test_basis_satisfies_constraints(self):
        spec = build_local_code(7, 2, 1)
        constraints = local_constraint_matrix(7, 2, 1)
        assert not np.any(constraints @ spec.basis_eval.T % 7)

    def test_skew_line_points_match_index_table(self):
        points = skew_line_points(2, 3, 7)
        assert points[0] == (2, 0, 3) and points[1] == (2, 1, 5)
        assert [point_index(*pt, 7) for pt in points] == skew_line_indices(7)[2 + 7 * 3].tolist()

    def test_skew_lines_have_low_degree(self):
        spec = build_local_code(7, 1, 2)
        word = spec.encode(counter_rng(3, 0).integers(0, 7, size=spec.dim))
        assert np.all(univariate_degree(word[skew_line_indices(7)], 7) <= 2)

    def test_coefficients_round_trip(self):
        spec = build_local_code(5, 1, 1)
        coeffs = counter_rng(5, 0).integers(0, 5, size=spec.dim)
        word = spec.encode(coeffs)
        assert np.array_equal(spec.coefficients_of(word), coeffs)

    def test_non_member(self):
        spec = build_local_code(5, 1, 1)
        word = spec.encode(np.ones(spec.dim, dtype=np.int64))
        word[0] = (word[0] + 1) % 5
        assert spec.coefficients_of(word) is None
        assert not spec.contains(word)

    def test_enumeration_budget(self):
        spec = build_local_code(5, 1, 1)
        with pytest.raises(BudgetExceededError) as exc:
            next(spec.enumerate_codewords(budget=100))
        assert exc.value.size_report["codewords"] == 5**8

    def test_enumeration_order(self):
        spec = build_local_code(5, 0, 0)
        coeffs, words = spec.all_codewords()
        assert np.array_equal(coeffs[:, 0], np.arange(5))
        assert np.array_equal(words, spec.encode(coeffs))


class TestSupportAndBinomial:
    """Tests for the coefficient-support and binomial-matrix statements."""

    @pytest.mark.parametrize("p,d_x,d_y", [(5, 1, 1), (7, 2, 2), (7, 1, 3), (11, 2, 3)])
    def test_coefficient_support(self, p, d_x, d_y):
        check = coeff_support_check(build_local_code(p, d_x, d_y))
        assert check.ok
        assert not check.skipped
        assert check.violations == []

    def test_support_check_skipped_outside_hypothesis(self):
        check = coeff_support_check(build_local_code(3, 1, 1))
        assert check.ok and check.skipped

    @pytest.mark.parametrize("p", [5, 7])
    def test_binomial_matrix_full_rank(self, p):
        for m in range(p):
            for k in range(m + 1):
                for r in range(k + 1):
                    result = binomial_matrix_rank(m, k, r, p)
                    assert result.hypothesis_ok
                    assert result.full_rank, (m, k, r, p)

    def test_agreement_parameters(self):
        eps0, rho = local_agreement_parameters(17, 1, 1)
        assert eps0 == pytest.approx((13 / 85) ** 3)
        assert rho == 4.0
        assert local_agreement_parameters(5, 2, 1)[0] is None


@pytest.mark.slow
@pytest.mark.parametrize("p", [11, 13])
def test_rate_sweep_large_primes(p):
    for d_x in range(p - 1):
        for d_y in range(p - 1 - d_x):
            if d_x + d_y + 2 > p:
                continue
            spec = build_local_code(p, d_x, d_y)
            assert spec.dim == local_dim_formula(d_x, d_y)
            assert coeff_support_check(spec).ok
