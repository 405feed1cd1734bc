import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import DegreeCurve, SampledSet
from .optimize import Bracket, ModulusProgram, SolverOptions, Status, max_modulus
from .poly import (
    Poly1,
    Poly2,
    chebyshev_matrix,
    from_chebyshev_vector,
    from_monomial_vector,
    monomial_matrix,
)


logger = logging.getLogger(__name__)

HULL_TOL = 1e-6
# lower bounds within round-off of log 1 are reported as exactly zero
ZERO_TOL = 1e-12


def _log(value: float) -> float:
    if value <= 0.0:
        return -math.inf
    if math.isinf(value):
        return math.inf
    return math.log(value)


def as_point(z, dim: int) -> np.ndarray:
    """Normalize a scalar or coordinate sequence to a point of the given dimension."""
    point = np.atleast_1d(np.asarray(z, dtype=complex)).reshape(-1)
    if point.size != dim:
        raise ValueError(f"Dimension mismatch: point {tuple(point)} for a {dim}-D set")
    if not np.all(np.isfinite(point)):
        raise ValueError(f"Point {tuple(point)} is not finite")
    return point


@dataclass(frozen=True)
class ExtremalEstimate:
    """Truncated extremal function at one point.

    ``curve`` holds (1/d)·log of each degree's bracket; ``value`` is the
    running maximum of the lower ends clamped at zero, or +inf once any degree
    is unbounded.
    """

    point: tuple[complex, ...]
    curve: DegreeCurve
    value: float
    brackets: dict[int, Bracket] = field(default_factory=dict)
    witnesses: dict[int, Poly1 | Poly2] = field(default_factory=dict)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    @property
    def top_degree(self) -> int:
        return max(self.curve.degrees)


@dataclass(frozen=True)
class HullSlice:
    """Grid sweep of extremal estimates; a node that failed keeps its error text."""

    nodes: tuple
    estimates: tuple[ExtremalEstimate | None, ...]
    errors: tuple[str | None, ...]
    z0: complex | None = None
    summary: float | None = None

    def __len__(self):
        return len(self.nodes)

    @property
    def values(self) -> list[float]:
        return [math.nan if est is None else est.value for est in self.estimates]


def _degree_program(K: SampledSet, point: np.ndarray, degree: int, phase_count: int):
    if K.is_real_interval:
        interval = K.interval
        constraints = chebyshev_matrix(K.points[:, 0], degree, interval)
        objective = chebyshev_matrix(point, degree, interval)[0]
    else:
        constraints = monomial_matrix(K.points, degree)
        objective = monomial_matrix(point[None, :], degree)[0]
    return ModulusProgram(objective, constraints, phase_count)


def _witness(K: SampledSet, bracket: Bracket, degree: int) -> Poly1 | Poly2 | None:
    if bracket.witness is None or bracket.status is not Status.BOUNDED:
        return None
    if K.is_real_interval:
        return from_chebyshev_vector(bracket.witness, K.interval)
    return from_monomial_vector(bracket.witness, degree, K.dim)


def check_degree(K: SampledSet, d_max: int):
    if d_max < 1:
        raise ValueError(f"Degree bound must be >= 1, got {d_max}")
    if K.circle_samples is not None and K.circle_samples < 8 * d_max:
        raise ValueError(
            f"N = {K.circle_samples} circle samples are too few for degree {d_max} "
            f"(need N >= {8 * d_max})"
        )


def extremal_at(
    K: SampledSet,
    z,
    d_max: int,
    *,
    phase_count: int = 64,
    options: SolverOptions | None = None,
) -> ExtremalEstimate:
    """Brackets of (1/d)·log sup{|p(z)| : deg p <= d, ‖p‖_K <= 1} for d = 1..d_max."""
    point = as_point(z, K.dim)
    check_degree(K, d_max)

    curve = DegreeCurve()
    brackets: dict[int, Bracket] = {}
    witnesses: dict[int, Poly1 | Poly2] = {}
    for degree in range(1, d_max + 1):
        bracket = max_modulus(_degree_program(K, point, degree, phase_count), options)
        brackets[degree] = bracket
        curve.add(degree, _log(bracket.lb) / degree, _log(bracket.ub) / degree, bracket.status)
        witness = _witness(K, bracket, degree)
        if witness is not None:
            witnesses[degree] = witness

    if any(b.status is Status.UNBOUNDED for b in brackets.values()):
        value = math.inf
    else:
        value = max(curve.running_max_lower())
        value = value if value > ZERO_TOL else 0.0

    logger.debug("V at %s up to degree %d: %.12g", tuple(point), d_max, value)
    return ExtremalEstimate(tuple(complex(c) for c in point), curve, value, brackets, witnesses)


def extremal_grid(
    K: SampledSet,
    grid: Sequence,
    d_max: int,
    *,
    threads: int = 1,
    phase_count: int = 64,
    options: SolverOptions | None = None,
) -> HullSlice:
    """Evaluate extremal_at over grid nodes; failures are recorded per node."""

    def _evaluate(node):
        try:
            return extremal_at(K, node, d_max, phase_count=phase_count, options=options), None
        except Exception as exc:
            logger.debug("Grid node %s failed: %s", node, exc)
            return None, str(exc)

    nodes = tuple(grid)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(_evaluate, nodes))

    return HullSlice(
        nodes=nodes,
        estimates=tuple(result[0] for result in results),
        errors=tuple(result[1] for result in results),
    )


def polynomial_hull_test(
    K: SampledSet,
    z,
    d_max: int,
    *,
    phase_count: int = 64,
    options: SolverOptions | None = None,
) -> bool:
    """True when |p(z)| <= ‖p‖_K holds, up to HULL_TOL, for every degree up to d_max."""
    estimate = extremal_at(K, z, d_max, phase_count=phase_count, options=options)
    return all(
        bracket.status is Status.BOUNDED and bracket.ub <= 1.0 + HULL_TOL
        for bracket in estimate.brackets.values()
    )


def projective_constant(
    K: SampledSet,
    z,
    d_max: int,
    *,
    phase_count: int = 64,
    options: SolverOptions | None = None,
) -> DegreeCurve:
    """Brackets of C_z(d), the least C with |p(z)| <= C^d ‖p‖_K for deg p <= d."""
    estimate = extremal_at(K, z, d_max, phase_count=phase_count, options=options)
    return estimate.curve.mapped(math.exp)
