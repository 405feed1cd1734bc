"""Module constants for {a + bφ : a, b analytic polynomials} and the boundedness classifier."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .core import BoundaryFunction, DegreeCurve
from .optimize import Bracket, ModulusProgram, SolverOptions, Status, max_modulus
from .poly import Poly1


logger = logging.getLogger(__name__)

DEFAULT_DEGREES = (4, 8, 16, 24)
DEFAULT_GROWTH_RATIO = 1.5
RUDIN_TOL = 1e-6

VERDICTS = ("bounded", "growing", "inconclusive")


@dataclass(frozen=True)
class ModuleQuery:
    phi: BoundaryFunction
    z: complex
    lam: complex
    d: int
    allow_origin: bool = False

    def __post_init__(self):
        z = complex(self.z)
        if not abs(z) < 1.0:
            raise ValueError(f"Module query point must lie in the unit disk, got {z}")
        if z == 0 and not self.allow_origin:
            raise ValueError("z = 0 needs allow_origin (φ continuous on the whole disk)")
        if self.d < 1:
            raise ValueError(f"Degree bound must be >= 1, got {self.d}")
        if self.phi.N < 8 * self.d:
            raise ValueError(
                f"N = {self.phi.N} samples are too few for degree {self.d} (need N >= {8 * self.d})"
            )
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "lam", complex(self.lam))


@dataclass(frozen=True)
class ModuleVerdict:
    z: complex
    lam: complex
    verdict: str
    curve: DegreeCurve
    flags: tuple[str, ...] = field(default_factory=tuple)


def module_program(q: ModuleQuery, phase_count: int = 64) -> ModulusProgram:
    """Coefficients are (a_0..a_d, b_0..b_d); rows evaluate a + bφ at the circle samples."""
    vander = P.polyvander(q.phi.points, q.d)
    constraints = np.hstack([vander, q.phi.samples[:, None] * vander])
    powers = q.z ** np.arange(q.d + 1)
    objective = np.concatenate([powers, q.lam * powers])
    return ModulusProgram(objective, constraints, phase_count)


def module_constant(
    q: ModuleQuery,
    *,
    phase_count: int = 64,
    options: SolverOptions | None = None,
) -> Bracket:
    """Bracket of W(d) = sup |a(z) + b(z)λ| over deg a, b <= d with ‖a + bφ‖_𝕋 <= 1."""
    bracket = max_modulus(module_program(q, phase_count), options)
    logger.debug(
        "W(%d) at z=%s, λ=%s: [%.12g, %.12g] %s", q.d, q.z, q.lam, bracket.lb, bracket.ub,
        bracket.status,
    )
    return bracket


def split_witness(bracket: Bracket, d: int) -> tuple[Poly1, Poly1]:
    """Return the (a, b) pair behind a bracket's lower bound."""
    if bracket.witness is None:
        raise ValueError("Bracket carries no witness")
    return Poly1(bracket.witness[: d + 1]), Poly1(bracket.witness[d + 1 :])


def rudin_test(
    q: ModuleQuery,
    *,
    tol: float = RUDIN_TOL,
    phase_count: int = 64,
    options: SolverOptions | None = None,
) -> bool:
    """True when |f(z)| <= ‖f‖ on the circle for the whole truncated module."""
    bracket = module_constant(q, phase_count=phase_count, options=options)
    return bracket.status is Status.BOUNDED and bracket.ub <= 1.0 + tol


def _ratio(top: float, bottom: float) -> float:
    if bottom <= 0.0:
        return math.inf if top > 0.0 else 1.0
    return top / bottom


def verdict_for(
    brackets: dict[int, Bracket], growth_ratio: float = DEFAULT_GROWTH_RATIO
) -> tuple[str, tuple[str, ...]]:
    """Three-valued verdict from brackets at increasing degrees."""
    degrees = sorted(brackets)
    unbounded = [d for d in degrees if brackets[d].status is Status.UNBOUNDED]
    if unbounded:
        return "growing", (f"unbounded at d={unbounded[0]}",)
    failed = [d for d in degrees if brackets[d].status is Status.INFEASIBLE_NUMERICS]
    if failed:
        return "inconclusive", (f"infeasible-numerics at d={failed[0]}",)

    first, last = brackets[degrees[0]], brackets[degrees[-1]]
    if _ratio(last.ub, first.lb) <= growth_ratio:
        return "bounded", ()

    step = growth_ratio ** (1.0 / (len(degrees) - 1))
    if all(
        _ratio(brackets[hi].lb, brackets[lo].ub) >= step for lo, hi in zip(degrees, degrees[1:])
    ):
        return "growing", ()
    return "inconclusive", ()


def classify_module(
    phi: BoundaryFunction,
    z_list: Sequence[complex],
    lambda_rule: Callable[[complex], complex],
    d_list: Sequence[int] = DEFAULT_DEGREES,
    growth_ratio: float = DEFAULT_GROWTH_RATIO,
    *,
    allow_origin: bool = False,
    threads: int = 1,
    phase_count: int = 64,
    options: SolverOptions | None = None,
) -> list[ModuleVerdict]:
    """Per-point bounded/growing/inconclusive verdicts over a degree sweep."""
    d_list = [int(d) for d in d_list]
    if len(d_list) < 3 or any(b <= a for a, b in zip(d_list, d_list[1:])):
        raise ValueError(f"Degree list must be increasing with at least 3 entries, got {d_list}")
    if growth_ratio <= 1.0:
        raise ValueError(f"growth_ratio must exceed 1, got {growth_ratio}")

    queries = [
        ModuleQuery(phi, z, lambda_rule(z), d, allow_origin=allow_origin)
        for z in z_list
        for d in d_list
    ]

    def _solve(query: ModuleQuery) -> Bracket:
        return module_constant(query, phase_count=phase_count, options=options)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(_solve, queries))

    verdicts = []
    for index, z in enumerate(z_list):
        chunk = queries[index * len(d_list) : (index + 1) * len(d_list)]
        brackets = dict(zip(d_list, results[index * len(d_list) : (index + 1) * len(d_list)]))
        curve = DegreeCurve()
        for d, bracket in brackets.items():
            curve.add(d, bracket.lb, bracket.ub, bracket.status)
        verdict, flags = verdict_for(brackets, growth_ratio)
        logger.debug("Module verdict at z=%s: %s %s", z, verdict, flags)
        verdicts.append(ModuleVerdict(chunk[0].z, chunk[0].lam, verdict, curve, flags))
    return verdicts
