"""Dense two-phase tableau simplex for standard-form linear programs.

Solves ``min c^T y  s.t.  A y = b, y >= 0`` where columns of ``A`` may be
appended between solves. The tableau keeps its artificial block, so the
basis inverse, the simplex multipliers and a phase-one Farkas certificate are
always available without refactoring.
"""

import logging
from dataclasses import dataclass
from enum import StrEnum

import numpy as np


logger = logging.getLogger(__name__)


class SimplexStatus(StrEnum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration-limit"


@dataclass(frozen=True)
class SimplexResult:
    status: SimplexStatus
    objective: float
    multipliers: np.ndarray
    farkas: np.ndarray | None
    iterations: int


class DenseSimplex:
    """Tableau simplex with Dantzig pricing, falling back to Bland's rule on stalls."""

    def __init__(
        self,
        b,
        *,
        pivot_tol: float = 1e-11,
        feas_tol: float = 1e-10,
        max_iter: int = 20000,
        bland_after: int = 50,
    ):
        b = np.asarray(b, dtype=float)
        self._rows = b.size
        # rows are flipped so that the artificial start has a nonnegative right-hand side
        self._sign = np.where(b < 0, -1.0, 1.0)
        self._rhs = b * self._sign
        self._table = np.eye(self._rows)
        self._cost = np.zeros(self._rows)
        self._basis = np.arange(self._rows)
        self._phase = 1
        self._scale = max(1.0, float(np.max(np.abs(b), initial=0.0)))
        self.pivot_tol = pivot_tol
        self.feas_tol = feas_tol
        self.max_iter = max_iter
        self.bland_after = bland_after
        self.iterations = 0

    @property
    def column_count(self) -> int:
        return self._table.shape[1] - self._rows

    def add_columns(self, columns, costs):
        """Append structural columns (rows x k) with their phase-two costs."""
        columns = np.asarray(columns, dtype=float).reshape(self._rows, -1)
        transformed = self._table[:, : self._rows] @ (self._sign[:, None] * columns)
        self._table = np.hstack([self._table, transformed])
        self._cost = np.concatenate([self._cost, np.asarray(costs, dtype=float).reshape(-1)])

    def _phase_costs(self) -> np.ndarray:
        if self._phase == 1:
            costs = np.zeros(self._table.shape[1])
            costs[: self._rows] = 1.0
            return costs
        return self._cost

    def _multipliers(self, costs: np.ndarray) -> np.ndarray:
        return self._sign * (costs[self._basis] @ self._table[:, : self._rows])

    def _pivot(self, row: int, col: int):
        pivot_row = self._table[row] / self._table[row, col]
        pivot_rhs = self._rhs[row] / self._table[row, col]
        factors = self._table[:, col].copy()
        factors[row] = 0.0
        self._table -= np.outer(factors, pivot_row)
        self._rhs -= factors * pivot_rhs
        self._table[row] = pivot_row
        self._rhs[row] = pivot_rhs
        np.maximum(self._rhs, 0.0, out=self._rhs)
        self._basis[row] = col

    def _leaving_row(self, column: np.ndarray) -> int | None:
        if self._phase == 2:
            # basic artificials sit at zero and must never grow
            stuck = np.flatnonzero((self._basis < self._rows) & (np.abs(column) > self.pivot_tol))
            if stuck.size:
                return int(stuck[0])

        positive = np.flatnonzero(column > self.pivot_tol)
        if positive.size == 0:
            return None
        ratios = self._rhs[positive] / column[positive]
        best = ratios.min()
        ties = positive[ratios <= best + 1e-12 * max(1.0, abs(best))]
        return int(ties[np.argmin(self._basis[ties])])

    def _iterate(self) -> SimplexStatus:
        costs = self._phase_costs()
        stalled = 0
        while True:
            if self.iterations >= self.max_iter:
                return SimplexStatus.ITERATION_LIMIT

            reduced = costs - costs[self._basis] @ self._table
            reduced[self._basis] = 0.0
            if self._phase == 2:
                reduced[: self._rows] = 0.0

            candidates = np.flatnonzero(reduced < -self.pivot_tol)
            if candidates.size == 0:
                return SimplexStatus.OPTIMAL

            if stalled >= self.bland_after:
                enter = int(candidates[0])
            else:
                enter = int(candidates[np.argmin(reduced[candidates])])

            column = self._table[:, enter]
            leave = self._leaving_row(column)
            if leave is None:
                return SimplexStatus.UNBOUNDED

            step = self._rhs[leave] / column[leave]
            stalled = stalled + 1 if abs(step) <= self.pivot_tol else 0
            self._pivot(leave, enter)
            self.iterations += 1

    def _drive_out_artificials(self):
        for row in np.flatnonzero(self._basis < self._rows):
            structural = np.flatnonzero(np.abs(self._table[row, self._rows :]) > self.pivot_tol)
            if structural.size:
                self._pivot(int(row), int(structural[0]) + self._rows)
            # otherwise the row is redundant and its artificial stays at zero

    def _result(self, status: SimplexStatus, farkas=None) -> SimplexResult:
        costs = self._phase_costs()
        return SimplexResult(
            status=status,
            objective=float(costs[self._basis] @ self._rhs),
            multipliers=self._multipliers(costs),
            farkas=farkas,
            iterations=self.iterations,
        )

    def solve(self) -> SimplexResult:
        """Run (or resume) the two phases from the current basis."""
        if self._phase == 1:
            status = self._iterate()
            if status is SimplexStatus.ITERATION_LIMIT:
                return self._result(status)

            infeasibility = float(self._rhs[self._basis < self._rows].sum())
            if infeasibility > self.feas_tol * self._scale:
                farkas = self._multipliers(self._phase_costs())
                logger.debug("phase one stopped with infeasibility %.3g", infeasibility)
                return self._result(SimplexStatus.INFEASIBLE, farkas=farkas)

            self._drive_out_artificials()
            self._phase = 2

        status = self._iterate()
        if status is not SimplexStatus.OPTIMAL:
            logger.debug("phase two ended with %s after %d pivots", status, self.iterations)
        return self._result(status)
