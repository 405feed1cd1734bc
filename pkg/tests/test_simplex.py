import numpy as np
import pytest

from plurihull.simplex import DenseSimplex, SimplexStatus


def test_solves_small_program_with_multipliers():
    lp = DenseSimplex([4.0])
    lp.add_columns([[1.0, 2.0]], [1.0, 1.0])

    result = lp.solve()

    assert result.status is SimplexStatus.OPTIMAL
    assert result.objective == pytest.approx(2.0)
    assert result.multipliers == pytest.approx([0.5])


def test_negative_right_hand_side_keeps_original_signs():
    lp = DenseSimplex([-3.0])
    lp.add_columns([[1.0, -1.0]], [1.0, 1.0])

    result = lp.solve()

    assert result.status is SimplexStatus.OPTIMAL
    assert result.objective == pytest.approx(3.0)
    assert result.multipliers == pytest.approx([-1.0])


def test_appended_columns_resume_from_current_basis():
    lp = DenseSimplex([4.0])
    lp.add_columns([[1.0]], [1.0])
    first = lp.solve()

    lp.add_columns([[2.0]], [1.0])
    second = lp.solve()

    assert first.objective == pytest.approx(4.0)
    assert second.objective == pytest.approx(2.0)
    assert lp.column_count == 2


def test_infeasible_program_returns_farkas_certificate():
    A = np.array([[1.0, 1.0], [1.0, -1.0]])
    b = np.array([-1.0, 0.5])
    lp = DenseSimplex(b)
    lp.add_columns(A, [1.0, 1.0])

    result = lp.solve()

    assert result.status is SimplexStatus.INFEASIBLE
    assert result.farkas @ b > 0
    assert np.all(result.farkas @ A <= 1e-9)


def test_unbounded_phase_two():
    lp = DenseSimplex([1.0])
    lp.add_columns([[1.0, -1.0]], [-1.0, 0.0])

    assert lp.solve().status is SimplexStatus.UNBOUNDED


def test_iteration_limit_is_reported():
    lp = DenseSimplex([4.0], max_iter=0)
    lp.add_columns([[1.0]], [1.0])

    assert lp.solve().status is SimplexStatus.ITERATION_LIMIT


def test_duplicate_columns_terminate(rng):
    random = np.abs(rng.normal(size=(3, 20)))
    columns = np.hstack([np.eye(3), random, random])
    lp = DenseSimplex([0.0, 0.0, 1.0], bland_after=2)
    lp.add_columns(columns, np.ones(43))

    result = lp.solve()

    assert result.status is SimplexStatus.OPTIMAL
    assert result.iterations < 200
