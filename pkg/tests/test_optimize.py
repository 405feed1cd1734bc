import logging
import math

import numpy as np
import pytest

from plurihull.optimize import (
    Bracket,
    ModulusProgram,
    SolverOptions,
    Status,
    _ModulusSolver,
    max_modulus,
)


def test_single_coefficient_matches_closed_form():
    prog = ModulusProgram([2.0], [[1.0], [1j], [-0.5]])

    bracket = max_modulus(prog)

    assert bracket.status is Status.BOUNDED
    assert bracket.lb == pytest.approx(2.0, rel=1e-12)
    assert 2.0 * (1 - 1e-12) <= bracket.ub <= 2.0 * prog.ratio_bound
    assert abs(bracket.witness[0]) == pytest.approx(1.0)


def test_zero_objective_gives_zero_bracket():
    bracket = max_modulus(ModulusProgram([0.0, 0.0], np.eye(2)))

    assert (bracket.lb, bracket.ub, bracket.status) == (0.0, 0.0, Status.BOUNDED)


def test_free_direction_is_unbounded():
    bracket = max_modulus(ModulusProgram([0.0, 1.0], [[1.0, 0.0], [2.0, 0.0]]))

    assert bracket.status is Status.UNBOUNDED
    assert math.isinf(bracket.lb) and math.isinf(bracket.ub)
    assert abs(bracket.witness[0]) <= 1e-10


def test_all_zero_constraints_are_unbounded():
    bracket = max_modulus(ModulusProgram([1.0, 1j], np.zeros((4, 2))))

    assert bracket.status is Status.UNBOUNDED


@pytest.mark.parametrize(
    "objective, constraints, message",
    [
        ([], [[1.0]], "at least one"),
        ([1.0, 2.0], [[1.0]], "Dimension mismatch"),
        ([np.nan], [[1.0]], "finite"),
    ],
)
def test_program_validation(objective, constraints, message):
    with pytest.raises(ValueError, match=message):
        ModulusProgram(objective, constraints)


def test_phase_count_must_be_even():
    with pytest.raises(ValueError, match="phase_count"):
        ModulusProgram([1.0], [[1.0]], phase_count=7)


def test_bracket_rejects_inverted_bounds():
    with pytest.raises(ValueError, match="exceeds"):
        Bracket(2.0, 1.0)

    assert Bracket(1.0, 1.5).width == pytest.approx(0.5)
    assert not Bracket(0.0, math.inf, Status.INFEASIBLE_NUMERICS).is_bounded


def test_ratio_bound():
    assert ModulusProgram([1.0], [[1.0]], 64).ratio_bound == pytest.approx(
        1 / math.cos(math.pi / 64) ** 2
    )


def test_random_brackets_are_sound(rng):
    for _ in range(20):
        n = int(rng.integers(1, 4))
        m = int(rng.integers(3, 13))
        A = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
        L = rng.normal(size=n) + 1j * rng.normal(size=n)
        prog = ModulusProgram(L, A, phase_count=16)

        bracket = max_modulus(prog)

        assert bracket.status is Status.BOUNDED
        assert np.max(np.abs(A @ bracket.witness)) <= 1 + 1e-9
        assert abs(L @ bracket.witness) >= bracket.lb * (1 - 1e-9)
        assert bracket.lb <= bracket.ub <= bracket.lb * prog.ratio_bound + 1e-9


def test_one_variable_programs_match_brute_force(rng):
    for _ in range(20):
        a = rng.normal(size=6) + 1j * rng.normal(size=6)
        l = complex(rng.normal(), rng.normal())
        exact = abs(l) / np.max(np.abs(a))

        bracket = max_modulus(ModulusProgram([l], a[:, None], phase_count=8))

        assert bracket.lb == pytest.approx(exact, rel=1e-9)
        assert bracket.ub >= exact * (1 - 1e-9)


def test_refinement_only_tightens(rng):
    A = rng.normal(size=(24, 3)) + 1j * rng.normal(size=(24, 3))
    prog = ModulusProgram([1.0, 0.5j, -0.25], A, phase_count=8)

    coarse = max_modulus(prog, SolverOptions(refine_rounds=0))
    refined = max_modulus(prog)

    assert coarse.ub <= coarse.lb * prog.ratio_bound + 1e-9
    assert refined.ub <= coarse.ub + 1e-12
    assert refined.lb >= coarse.lb - 1e-12


def test_iteration_cap_reports_numerics(rng, caplog):
    A = rng.normal(size=(8, 2)) + 1j * rng.normal(size=(8, 2))

    with caplog.at_level(logging.WARNING):
        bracket = max_modulus(ModulusProgram([1.0, 1j], A), SolverOptions(max_iter=1))

    assert bracket.status is Status.INFEASIBLE_NUMERICS
    assert math.isinf(bracket.ub)
    assert "partial bracket" in caplog.text


def test_null_direction_without_gain_is_dropped(rng):
    x = rng.normal(size=5) + 1j * rng.normal(size=5)
    # c = (2, -1) is invisible to both the constraints and the objective
    prog = ModulusProgram([1.0, 2.0], np.column_stack([x, 2 * x]))

    bracket = max_modulus(prog)

    assert bracket.status is Status.BOUNDED
    assert bracket.lb == pytest.approx(1 / np.max(np.abs(x)), rel=1e-9)
    assert bracket.ub <= bracket.lb * prog.ratio_bound * (1 + 1e-9)


def test_null_direction_with_gain_is_unbounded(rng):
    x = rng.normal(size=5) + 1j * rng.normal(size=5)

    bracket = max_modulus(ModulusProgram([1.0, 2.5], np.column_stack([x, 2 * x])))

    assert bracket.status is Status.UNBOUNDED
    assert np.max(np.abs(np.column_stack([x, 2 * x]) @ bracket.witness)) <= 1e-10


def test_bracket_wider_than_polygon_is_not_reported_bounded(mocker, caplog):
    def inflate(solver, c):
        solver.ub = 3 * solver.best_lb

    mocker.patch.object(_ModulusSolver, "_refine", autospec=True, side_effect=inflate)
    prog = ModulusProgram([1.0, 0.5j], [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])

    with caplog.at_level(logging.WARNING):
        bracket = max_modulus(prog)

    assert bracket.status is Status.INFEASIBLE_NUMERICS
    assert bracket.lb > 0.0
    assert "wider than the polygon allows" in caplog.text


def _brute_force(L, A, zooms=6):
    """Best |L u| / max_j |A_j u| over u = (cos a, sin a e^{ib}) on grids zooming in on the max."""
    a_range, b_range = (0.0, np.pi / 2), (0.0, 2 * np.pi)
    best = 0.0
    for _ in range(zooms):
        alpha = np.linspace(*a_range, 201)[:, None]
        beta = np.linspace(*b_range, 401)[None, :]
        u = np.stack([np.cos(alpha) * np.ones_like(beta), np.sin(alpha) * np.exp(1j * beta)])
        ratio = np.abs(np.tensordot(L, u, axes=1)) / np.max(
            np.abs(np.tensordot(A, u, axes=1)), axis=0
        )
        i, j = np.unravel_index(np.argmax(ratio), ratio.shape)
        best = max(best, float(ratio[i, j]))
        da = (a_range[1] - a_range[0]) / 20
        db = (b_range[1] - b_range[0]) / 20
        a_range = (max(0.0, alpha[i, 0] - da), min(np.pi / 2, alpha[i, 0] + da))
        b_range = (beta[0, j] - db, beta[0, j] + db)
    return best


def test_two_variable_programs_are_sandwiched(rng):
    for _ in range(10):
        m = int(rng.integers(2, 4))
        A = rng.normal(size=(m, 2)) + 1j * rng.normal(size=(m, 2))
        L = rng.normal(size=2) + 1j * rng.normal(size=2)
        grid = _brute_force(L, A)

        bracket = max_modulus(ModulusProgram(L, A))

        assert bracket.status is Status.BOUNDED
        assert bracket.ub >= grid * (1 - 1e-9)
        assert bracket.lb <= grid * (1 + 1e-3)


def test_added_constraint_and_column_stay_within_polygon_slack(rng):
    for _ in range(10):
        A = rng.normal(size=(6, 2)) + 1j * rng.normal(size=(6, 2))
        L = rng.normal(size=2) + 1j * rng.normal(size=2)
        base_prog = ModulusProgram(L, A)
        base = max_modulus(base_prog)

        row = rng.normal(size=(1, 2)) + 1j * rng.normal(size=(1, 2))
        more_rows = max_modulus(ModulusProgram(L, np.vstack([A, row])))
        column = rng.normal(size=(6, 1)) + 1j * rng.normal(size=(6, 1))
        more_columns = max_modulus(ModulusProgram(np.append(L, 1.0), np.hstack([A, column])))

        assert more_rows.ub <= base.ub * base_prog.ratio_bound * (1 + 1e-9)
        assert more_rows.lb <= base.ub * (1 + 1e-9)
        assert more_columns.lb >= base.lb / base_prog.ratio_bound * (1 - 1e-9)
        assert more_columns.ub >= base.lb * (1 - 1e-9)


def test_doubling_phases_keeps_bracket_within_finer_polygon(rng):
    for _ in range(5):
        A = rng.normal(size=(10, 3)) + 1j * rng.normal(size=(10, 3))
        L = rng.normal(size=3) + 1j * rng.normal(size=3)
        coarse_prog = ModulusProgram(L, A, phase_count=8)
        fine_prog = ModulusProgram(L, A, phase_count=16)
        coarse = max_modulus(coarse_prog, SolverOptions(refine_rounds=0))
        fine = max_modulus(fine_prog, SolverOptions(refine_rounds=0))

        assert fine.width <= coarse.ub * (fine_prog.ratio_bound - 1) * (1 + 1e-9)
        assert fine.width <= coarse.lb * (coarse_prog.ratio_bound - 1) * (1 + 1e-9)
