"""
Tests for the algebra service: prime fields, the ring R_n, GF(p) elimination and the
eigensolver wrapper.
"""

import numpy as np
import pytest
import scipy.sparse as sp

from hdxcodes.services.algebra import (
    AlgebraError,
    BudgetExceededError,
    ParameterError,
    PrimeField,
    Ring,
    RingElement,
    ShapeError,
    SpectralValidationError,
    counter_rng,
    inv,
    inverse_matrix,
    is_prime,
    is_primitive,
    matrix_rank,
    normalized_adjacency,
    power_table,
    primitive_modulus,
    rank_nullspace,
    ring_mul,
    second_eigenvalue,
    solve_unique,
)
from hdxcodes.services.coset_complex import h_element


class TestPrimeField:
    """Tests for scalar field helpers."""

    @pytest.mark.parametrize("p,expected", [(2, True), (3, True), (9, False), (13, True), (1, False)])
    def test_is_prime(self, p, expected):
        assert is_prime(p) is expected

    def test_inverse(self):
        assert inv(3, 7) == 5
        assert all(a * inv(a, 11) % 11 == 1 for a in range(1, 11))

    def test_field_object(self):
        field = PrimeField(7)
        assert field.inv(3) == 5
        assert field.reduce([-1, 9]).tolist() == [6, 2]
        assert field.nonzero().size == 6
        with pytest.raises(ParameterError):
            PrimeField(8)

    def test_inverse_of_zero(self):
        with pytest.raises(ZeroDivisionError):
            inv(0, 5)

    def test_power_table_zero_to_zero(self):
        table = power_table(5, 3, 5)
        assert table.shape == (5, 4)
        assert table[0, 0] == 1
        assert table[0, 1] == 0
        assert table[2, 3] == 8 % 5

    def test_counter_rng_is_reproducible(self):
        a = counter_rng(7, 1, 2).integers(0, 100, size=10)
        b = counter_rng(7, 1, 2).integers(0, 100, size=10)
        c = counter_rng(7, 1, 3).integers(0, 100, size=10)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)


class TestRing:
    """Tests for F_q[t]/<phi> and 3x3 matrices over it."""

    def test_rejects_composite_modulus(self):
        with pytest.raises(ParameterError):
            Ring(4, (1, 1))

    def test_rejects_non_monic(self):
        with pytest.raises(ParameterError):
            Ring(3, (1, 2))

    def test_multiplication_reduces(self):
        ring = Ring(3, (1, 0, 1))  # t^2 = -1
        t = ring.t()
        assert np.array_equal(ring.mul(t, t), [2, 0])

    def test_t_for_linear_modulus(self):
        ring = Ring(3, (1, 1))  # t = -1
        assert np.array_equal(ring.t(), [2])

    def test_ring_mul_shape_error(self):
        ring = Ring(3, (1, 0, 1))
        with pytest.raises(ShapeError):
            ring_mul(ring.element([1, 0]), RingElement((1,)), ring)

    def test_element_length_checked(self):
        with pytest.raises(ShapeError):
            Ring(3, (1, 0, 1)).element([1, 2, 0])

    def test_generator_inverse_by_adjugate(self):
        ring = primitive_modulus(3, 2).as_ring(3)
        h = h_element(ring, 2, 1)
        assert np.array_equal(ring.det(h), ring.one())
        assert np.array_equal(ring.matmul(h, ring.adjugate(h)), ring.identity_matrix())

    def test_batched_matmul(self):
        ring = Ring(5, (2, 1))
        mats = np.stack([h_element(ring, k, a) for k in (1, 2, 3) for a in range(5)])
        prods = ring.matmul(mats, ring.identity_matrix())
        assert np.array_equal(prods, mats)


class TestPrimitiveModulus:
    """Tests for the primitive polynomial search."""

    def test_reference_instance(self):
        result = primitive_modulus(3, 1)
        assert result.coeffs == (1, 1)
        assert result.three_coprime

    def test_binary_cubic(self):
        assert primitive_modulus(2, 3).coeffs == (1, 1, 0, 1)

    def test_result_is_primitive(self):
        result = primitive_modulus(5, 2)
        assert is_primitive(result.as_ring(5))
        assert result.three_coprime is False  # 24 is divisible by 3

    def test_degree_must_be_positive(self):
        with pytest.raises(ParameterError):
            primitive_modulus(3, 0)


class TestElimination:
    """Tests for exact GF(p) rank, nullspace and solving."""

    def test_rank_and_nullspace(self):
        m = np.array([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
        res = rank_nullspace(m, 7)
        assert res.rank == 2
        assert res.nullspace.shape == (1, 3)
        assert not np.any(m @ res.nullspace.T % 7)

    def test_sparse_input(self):
        m = sp.csr_matrix(np.eye(4, dtype=np.int64) * 3)
        assert matrix_rank(m, 5) == 4

    def test_consistent_solution(self):
        m = np.array([[1, 1], [1, 2]])
        rhs = np.array([3, 4])
        sol = solve_unique(m, rhs, 5)
        assert sol is not None
        assert np.array_equal(m @ sol % 5, rhs % 5)

    def test_inconsistent_system(self):
        m = np.array([[1, 1], [2, 2]])
        res = rank_nullspace(m, 5, np.array([1, 3]))
        assert res.consistent is False
        assert res.solution is None

    def test_rhs_shape_checked(self):
        with pytest.raises(ShapeError):
            rank_nullspace(np.eye(3), 5, np.zeros(2))

    def test_inverse_matrix(self):
        m = np.array([[2, 1], [1, 1]])
        inverse = inverse_matrix(m, 7)
        assert np.array_equal(m @ inverse % 7, np.eye(2, dtype=np.int64))

    def test_singular_inverse(self):
        with pytest.raises(AlgebraError):
            inverse_matrix(np.array([[1, 2], [2, 4]]), 7)

    def test_large_prime_dtype(self):
        p = 65_537
        m = np.array([[p - 1, 2], [3, p - 2]])
        res = rank_nullspace(m, p)
        assert res.rank == 2


class TestSpectral:
    """Tests for the symmetric eigensolver."""

    def test_complete_graph(self):
        adj = np.ones((4, 4)) - np.eye(4)
        result = second_eigenvalue(normalized_adjacency(adj))
        assert result.lambda2 == pytest.approx(-1.0 / 3.0, abs=1e-12)
        assert result.eigenvalues[0] == pytest.approx(1.0, abs=1e-12)

    def test_rejects_asymmetric(self):
        with pytest.raises(SpectralValidationError):
            second_eigenvalue(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_isolated_vertex(self):
        with pytest.raises(AlgebraError):
            normalized_adjacency(np.zeros((2, 2)))


def test_budget_error_carries_size_report():
    error = BudgetExceededError("too big", {"budget": 10, "needed": 11})
    assert error.size_report == {"budget": 10, "needed": 11}
    assert str(error) == "too big"
