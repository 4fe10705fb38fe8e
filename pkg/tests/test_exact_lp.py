"""Tests for the exact transportation simplex and the dense tableau."""
from fractions import Fraction

import pytest

from construction.exact_lp import DenseTableau, solve_transport

F = Fraction


class TestTransport:
    def test_single_source(self):
        solution = solve_transport([2], [1, 1], [[2, 1]])
        assert solution.cost == 3
        assert solution.dual_feasible
        assert solution.dual_value == 3

    def test_northwest_start_already_optimal(self):
        solution = solve_transport([1, 1], [1, 1], [[1, 3], [3, 1]])
        assert solution.cost == 2
        assert solution.pivots == 0

    def test_one_pivot(self):
        solution = solve_transport([1, 1], [1, 1], [[3, 1], [1, 3]])
        assert solution.cost == 2
        assert solution.pivots == 1
        assert solution.flows[(0, 1)] == 1
        assert solution.flows[(1, 0)] == 1
        assert solution.dual_value == solution.cost

    def test_rational_masses(self):
        solution = solve_transport([F(1, 2), F(3, 2)], [F(1, 3), F(5, 3)], [[1, 2], [4, 1]])
        assert solution.dual_feasible
        assert solution.cost == solution.dual_value
        assert sum(solution.flows.values()) == 2

    def test_potentials_bound_every_cost(self):
        cost = [[4, 1, 3], [2, 5, 1], [3, 2, 2]]
        solution = solve_transport([2, 3, 1], [1, 3, 2], cost)
        u, v = solution.row_potentials, solution.column_potentials
        assert all(u[i] + v[j] <= cost[i][j] for i in range(3) for j in range(3))
        assert solution.cost == solution.dual_value

    def test_unbalanced(self):
        with pytest.raises(ValueError, match="unbalanced"):
            solve_transport([1], [2], [[1]])

    def test_nonpositive_mass(self):
        with pytest.raises(ValueError):
            solve_transport([1, 0], [1], [[1], [1]])

    def test_empty(self):
        with pytest.raises(ValueError):
            solve_transport([], [1], [])


class TestDenseTableau:
    def test_small_lp(self):
        tableau = DenseTableau([[1, 0], [0, 1], [1, 1]], [2, 3, 4], [1, 1])
        assert tableau.solve() == "optimal"
        assert tableau.value == 4
        x = tableau.solution()
        assert x[0] + x[1] == 4
        assert x[0] <= 2 and x[1] <= 3

    def test_rational_optimum(self):
        tableau = DenseTableau([[2, 1], [1, 2]], [2, 2], [1, 1])
        assert tableau.solve() == "optimal"
        assert tableau.value == F(4, 3)
        assert tableau.solution() == [F(2, 3), F(2, 3)]

    def test_unbounded(self):
        assert DenseTableau([[-1]], [1], [1]).solve() == "unbounded"

    def test_zero_objective(self):
        tableau = DenseTableau([[1]], [5], [0])
        assert tableau.solve() == "optimal"
        assert tableau.value == 0

    def test_needs_nonnegative_rhs(self):
        with pytest.raises(ValueError):
            DenseTableau([[1]], [-1], [1])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            DenseTableau([[1, 2]], [1], [1])
