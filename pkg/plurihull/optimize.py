"""Certified brackets for sup |L(c)| subject to |A_j(c)| <= 1.

The numerical null space of the constraints is split off first: a null
direction that moves L is an unbounded ray, one that does not is dropped.
On the remaining directions each modulus constraint is relaxed to a regular
polygon of half-planes Re(e^{2πik/m} A_j c) <= 1. Polygon rows are generated
lazily and the linear program is solved through its dual standard form, so
that the optimal primal coefficients fall out as simplex multipliers.
"""

import logging
import math
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from .simplex import DenseSimplex, SimplexStatus


logger = logging.getLogger(__name__)

MAX_GENERATION_ROUNDS = 200
POLYGON_TOL = 1e-9
STOP_GAP = 1e-12
NULL_RAY_TOL = 1e-10
RAY_GAIN_TOL = 1e-9
RATIO_SLACK = 1e-9


class Status(StrEnum):
    BOUNDED = "bounded"
    UNBOUNDED = "unbounded"
    INFEASIBLE_NUMERICS = "infeasible-numerics"


@dataclass(frozen=True)
class SolverOptions:
    pivot_tol: float = 1e-11
    feas_tol: float = 1e-10
    max_iter: int = 20000
    refine_rounds: int = 16


@dataclass(frozen=True)
class ModulusProgram:
    """sup |objective · c| over complex c with |constraints[j] · c| <= 1 for every row j."""

    objective: np.ndarray
    constraints: np.ndarray
    phase_count: int = 64

    def __post_init__(self):
        objective = np.asarray(self.objective, dtype=complex).reshape(-1)
        constraints = np.atleast_2d(np.asarray(self.constraints, dtype=complex))
        if objective.size == 0 or constraints.shape[0] == 0:
            raise ValueError("A modulus program needs at least one coefficient and one constraint")
        if constraints.ndim != 2 or constraints.shape[1] != objective.size:
            raise ValueError(
                f"Dimension mismatch: objective has {objective.size} coefficients, "
                f"constraints have shape {constraints.shape}"
            )
        if self.phase_count < 8 or self.phase_count % 2:
            raise ValueError(f"phase_count must be even and >= 8, got {self.phase_count}")
        if not (np.all(np.isfinite(objective)) and np.all(np.isfinite(constraints))):
            raise ValueError("Modulus program data must be finite")
        object.__setattr__(self, "objective", objective)
        object.__setattr__(self, "constraints", constraints)

    @property
    def shape(self) -> tuple[int, int]:
        return self.constraints.shape

    @property
    def ratio_bound(self) -> float:
        """Worst-case ub/lb allowed by the polygon relaxation."""
        return 1.0 / math.cos(math.pi / self.phase_count) ** 2

    def phases(self) -> np.ndarray:
        return np.exp(2j * np.pi * np.arange(self.phase_count) / self.phase_count)


@dataclass(frozen=True)
class Bracket:
    lb: float
    ub: float
    status: Status = Status.BOUNDED
    witness: np.ndarray | None = None

    def __post_init__(self):
        if self.status is Status.BOUNDED and self.lb > self.ub:
            raise ValueError(f"Bracket lower bound {self.lb} exceeds upper bound {self.ub}")

    @property
    def is_bounded(self) -> bool:
        return self.status is Status.BOUNDED

    @property
    def width(self) -> float:
        return self.ub - self.lb


class _ModulusSolver:
    def __init__(self, prog: ModulusProgram, options: SolverOptions):
        self.prog = prog
        self.options = options
        self.phases = prog.phases()
        self.objective_norm = float(np.linalg.norm(prog.objective))
        self.rows: set[tuple[int, int]] = set()
        self.best_lb = 0.0
        self.witness: np.ndarray | None = None
        self.ub = math.inf

    def _complex(self, vector: np.ndarray) -> np.ndarray:
        return vector[: self.n] + 1j * vector[self.n :]

    def _ray_bracket(self, ray: np.ndarray) -> Bracket | None:
        """Unbounded certificate when the objective gain along ray dominates its residual."""
        ray = ray / np.linalg.norm(ray)
        gain = abs(complex(self.prog.objective @ ray))
        if gain <= RAY_GAIN_TOL * self.objective_norm:
            return None
        residual = float(np.max(np.abs(self.prog.constraints @ ray)))
        if residual <= NULL_RAY_TOL * gain:
            return Bracket(math.inf, math.inf, Status.UNBOUNDED, ray)
        if gain / residual > self.best_lb:
            self.best_lb = gain / residual
            self.witness = ray / residual
        return None

    def _reduce(self) -> Bracket | None:
        """Split off the numerical null space of the constraints and whiten the rest.

        Null directions are certified as an unbounded ray when the objective
        gain along them dominates their residual, and dropped when they carry
        no gain. The kept directions are rescaled so that the reduced
        constraint matrix has orthonormal columns.
        """
        constraints = self.prog.constraints
        _, sigma, vh = np.linalg.svd(constraints, full_matrices=True)
        sigma = np.concatenate([sigma, np.zeros(vh.shape[0] - sigma.size)])
        rank = int(np.count_nonzero(sigma > NULL_RAY_TOL * sigma[0]))

        null = vh[rank:].conj().T
        if null.shape[1]:
            gain = self.prog.objective @ null
            if np.linalg.norm(gain) > RAY_GAIN_TOL * self.objective_norm:
                # the gain-weighted combination first, then single directions by gain/σ
                leverage = np.abs(gain) / np.maximum(sigma[rank:], np.finfo(float).tiny)
                candidates = [null @ np.conj(gain)] + [
                    null[:, k] for k in np.argsort(-leverage, kind="stable") if gain[k] != 0
                ]
                for ray in candidates:
                    bracket = self._ray_bracket(ray)
                    if bracket is not None:
                        logger.debug("Unbounded ray in a %d-dimensional null space", null.shape[1])
                        return bracket
                # small but nonzero singular values still move the objective
                rank = int(np.count_nonzero(sigma > 0.0))
            logger.debug("Dropped %d null directions", vh.shape[0] - rank)

        self.transform = vh[:rank].conj().T / sigma[:rank]
        self.constraints = constraints @ self.transform
        reduced = self.prog.objective @ self.transform
        self.gain = float(np.max(np.abs(reduced), initial=0.0))
        if self.gain == 0.0:
            return Bracket(0.0, 0.0, Status.BOUNDED, np.zeros(self.prog.objective.size, complex))

        self.n = rank
        self.batch = max(2 * rank, 8)
        reduced = reduced / self.gain
        self.simplex = DenseSimplex(
            np.concatenate([reduced.real, -reduced.imag]),
            pivot_tol=self.options.pivot_tol,
            feas_tol=self.options.feas_tol,
            max_iter=self.options.max_iter,
        )
        return None

    def _add_rows(self, rows: np.ndarray, units: np.ndarray):
        turned = units[:, None] * rows
        self.simplex.add_columns(
            np.vstack([turned.real.T, -turned.imag.T]), np.ones(units.size)
        )

    def _add_polygon_rows(self, points, phase_index) -> int:
        pairs = [(int(j), int(k)) for j, k in zip(points, phase_index)]
        pairs = [pair for pair in pairs if pair not in self.rows]
        if not pairs:
            return 0
        self.rows.update(pairs)
        j = np.array([pair[0] for pair in pairs])
        k = np.array([pair[1] for pair in pairs])
        self._add_rows(self.constraints[j], self.phases[k])
        return len(pairs)

    def _seed(self):
        m = self.prog.shape[0]
        count = min(m, max(2 * self.n, 4))
        points = np.unique(np.round(np.linspace(0, m - 1, count)).astype(int))
        quarters = np.unique(
            np.round(np.arange(4) * self.prog.phase_count / 4).astype(int) % self.prog.phase_count
        )
        self._add_polygon_rows(np.repeat(points, quarters.size), np.tile(quarters, points.size))

    def _add_violators(self, values: np.ndarray, threshold: float) -> int:
        """Add the best-phase polygon row at the points scoring above threshold."""
        count = self.prog.phase_count
        k = np.round(-np.angle(values) * count / (2.0 * np.pi)).astype(int) % count
        polygon = (self.phases[k] * values).real
        order = np.argsort(-polygon, kind="stable")
        chosen = [
            int(j) for j in order if polygon[j] > threshold and (int(j), int(k[j])) not in self.rows
        ][: self.batch]
        return self._add_polygon_rows(chosen, k[chosen])

    def _certify(self, reduced: np.ndarray) -> np.ndarray:
        """Record the exact ratio of c = T·reduced; return the reduced constraint values."""
        c = self.transform @ reduced
        worst = float(np.max(np.abs(self.prog.constraints @ c)))
        if worst > 0.0:
            lb = abs(complex(self.prog.objective @ c)) / worst
            if lb > self.best_lb:
                self.best_lb = lb
                self.witness = c / worst
        return self.constraints @ reduced

    def _numerics(self, reason) -> Bracket:
        logger.warning("Modulus program abandoned (%s); reporting a partial bracket", reason)
        return Bracket(self.best_lb, math.inf, Status.INFEASIBLE_NUMERICS, self.witness)

    def _generate(self) -> np.ndarray | Bracket:
        for round_number in range(MAX_GENERATION_ROUNDS):
            result = self.simplex.solve()

            if result.status is SimplexStatus.INFEASIBLE:
                ray = self._complex(result.farkas)
                if not np.any(ray):
                    return self._numerics("empty Farkas ray")
                bracket = self._ray_bracket(self.transform @ ray)
                if bracket is not None:
                    logger.debug("Unbounded ray confirmed after %d rounds", round_number)
                    return bracket
                if not self._add_violators(self.constraints @ ray, 0.0):
                    return self._numerics("Farkas ray cut no new rows")
                continue

            if result.status is not SimplexStatus.OPTIMAL:
                return self._numerics(result.status)

            c = self._complex(result.multipliers)
            self.ub = min(self.ub, self.gain * result.objective)
            values = self._certify(c)
            if not self._add_violators(values, 1.0 + POLYGON_TOL):
                logger.debug(
                    "Polygon converged after %d rounds, %d rows", round_number + 1, len(self.rows)
                )
                return c

        return self._numerics("generation round cap")

    def _refine(self, c: np.ndarray):
        """Exchange rounds of exact-phase cuts at the points where |A_j c| > 1."""
        for _ in range(self.options.refine_rounds):
            if self.best_lb >= self.ub * (1.0 - STOP_GAP):
                return
            values = self.constraints @ c
            moduli = np.abs(values)
            over = np.flatnonzero(moduli > 1.0 + STOP_GAP)
            if not over.size:
                return
            top = over[np.argsort(-moduli[over], kind="stable")][: 4 * self.batch]
            self._add_rows(self.constraints[top], np.conj(values[top]) / moduli[top])

            result = self.simplex.solve()
            if result.status is not SimplexStatus.OPTIMAL:
                logger.debug("Refinement stopped: %s", result.status)
                return
            c = self._complex(result.multipliers)
            self.ub = min(self.ub, self.gain * result.objective)
            self._certify(c)

    def solve(self) -> Bracket:
        if not np.any(self.prog.objective):
            return Bracket(0.0, 0.0, Status.BOUNDED, np.zeros(self.prog.objective.size, complex))

        outcome = self._reduce()
        if outcome is not None:
            return outcome

        self._seed()
        outcome = self._generate()
        if isinstance(outcome, Bracket):
            return outcome

        self._refine(outcome)
        lb, ub = self.best_lb, max(self.ub, self.best_lb)
        if lb <= 0.0 or ub > lb * self.prog.ratio_bound * (1.0 + RATIO_SLACK):
            return self._numerics(f"bracket [{lb:.6g}, {ub:.6g}] is wider than the polygon allows")
        logger.debug(
            "Bracket [%.12g, %.12g] after %d pivots", lb, ub, self.simplex.iterations
        )
        return Bracket(lb, ub, Status.BOUNDED, self.witness)


def max_modulus(prog: ModulusProgram, options: SolverOptions | None = None) -> Bracket:
    """Bracket sup{|L(c)| : |A_j(c)| <= 1 for all j}.

    The lower bound is always attained by ``witness``, a coefficient vector
    whose constraint moduli are at most one. The upper bound is the optimum of
    a linear relaxation whose feasible region contains the exact one, after
    directions on which every constraint and the objective vanish are removed.
    """
    return _ModulusSolver(prog, options or SolverOptions()).solve()
