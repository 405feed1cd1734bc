"""Acceptance corpus: oracle checks on the builtin functions plus seeded property suites."""

import logging
import math
import tempfile
from dataclasses import dataclass
from os import path
from time import perf_counter
from typing import Callable

import numpy as np

from .artifacts import EXTREMAL_HEADER, extremal_rows, write_csv
from .core import (
    CORPUS,
    BoundaryFunction,
    SampledSet,
    builtin_extension,
    builtin_phi,
    mobius_pullback,
    resolve_phi,
)
from .extend import (
    DEFAULT_DEGREES as EXTEND_DEGREES,
    annihilator,
    evaluate_quotient,
    extendability_score,
    pole_candidates,
    quotient_rule,
)
from .extremal import extremal_at, extremal_grid
from .hull import graph_set, hull_slice, pole_order_fit
from .modconst import ModuleQuery, classify_module, module_constant, rudin_test
from .optimize import ModulusProgram, Status, max_modulus
from .poly import sup_norm


logger = logging.getLogger(__name__)

INSTANCES = 20
LOG2 = math.log(2.0)
# agreement of the fitted interior value with the closed form
QUOTIENT_TOL = 1e-6


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _overlap(first, second, slack: float = 1e-9) -> bool:
    """Two brackets of the same quantity must intersect."""
    return first.lb <= second.ub * (1 + slack) and second.lb <= first.ub * (1 + slack)


def check_extremal_circle(rng, threads):
    K = SampledSet.circle(512)
    outside = extremal_at(K, 2.0, 8).value
    inside = extremal_at(K, 0.5, 8).value
    passed = LOG2 - 1e-9 <= outside <= LOG2 * 1.005 and inside == 0.0
    return passed, f"V(2) = {outside:.12g}, V(0.5) = {inside:.12g}"


def check_extremal_interval(rng, threads):
    K = SampledSet.chebyshev_interval(1024)
    estimate = extremal_at(K, 2.0, 16)
    oracle = math.log(np.polynomial.chebyshev.chebval(2.0, [0] * 16 + [1])) / 16
    lb16 = estimate.curve.lower(16)
    limit = math.log(2.0 + math.sqrt(3.0)) * 1.005
    passed = lb16 >= oracle - 1e-6 and estimate.value <= limit
    return passed, f"lb(16) = {lb16:.10g} (oracle {oracle:.10g}), V = {estimate.value:.10g}"


def check_module_exact(rng, threads):
    phi = builtin_phi("inverse", 256)
    details = []
    passed = True
    for d in (2, 4, 8, 16, 24):
        bracket = module_constant(ModuleQuery(phi, 0.5, 2.0, d))
        ok = bracket.lb <= 2.0 * (1 + 1e-9) and bracket.ub >= 2.0 * (1 - 1e-9)
        ok = ok and bracket.width <= 0.01
        passed = passed and ok
        details.append(f"W({d}) in [{bracket.lb:.8g}, {bracket.ub:.8g}]")
    low = module_constant(ModuleQuery(phi, 0.5, 3.0, 4))
    high = module_constant(ModuleQuery(phi, 0.5, 3.0, 16))
    # b = -z·a annihilates a + bφ on the circle, so a wrong λ can be unbounded outright
    growth = math.inf if high.status is Status.UNBOUNDED else high.lb / low.ub
    passed = passed and growth >= 1.5
    details.append(f"wrong λ growth W(16)/W(4) >= {growth:.4g}")
    return passed, "; ".join(details)


def check_rudin(rng, threads):
    q = ModuleQuery(builtin_phi("zero", 256), 0.5, 0.0, 16)
    bracket = module_constant(q)
    passed = rudin_test(q) and 1 - 1e-9 <= bracket.lb and bracket.ub <= 1.005
    return passed, f"W(16) in [{bracket.lb:.12g}, {bracket.ub:.12g}]"


def check_quotient(rng, threads):
    model = annihilator(builtin_phi("cos", 256), 2)
    h = evaluate_quotient(model, 0.3)
    poles = pole_candidates(model)
    double = pole_candidates(annihilator(builtin_phi("pole_m", 256, m=2), 2))
    passed = (
        model.residual <= 1e-10
        and abs(h - 1.09 / 0.6) <= 1e-6
        and len(poles) == 1
        and abs(poles[0][0]) <= 1e-8
        and poles[0][1] == 1
        and len(double) == 1
        and abs(double[0][0]) <= 1e-6
        and double[0][1] == 2
    )
    return passed, f"residual {model.residual:.3g}, h(0.3) = {h:.10g}, poles {poles}, {double}"


def check_mobius(rng, threads):
    failures = 0
    phi = builtin_phi("inverse", 256)
    for _ in range(5):
        a = complex(rng.uniform(0.1, 0.4) * np.exp(1j * rng.uniform(0, 2 * np.pi)))
        moved = mobius_pullback(phi, a)
        # 1/ζ pulled back by M_a is (1 + āζ)/(ζ + a), a simple pole at -a
        poles = pole_candidates(annihilator(moved, 2))
        ok = abs(moved.sup_norm() - 1.0) <= 1e-9 and len(poles) == 1
        ok = ok and abs(poles[0][0] + a) <= 1e-6 and poles[0][1] == 1
        failures += not ok
    return failures == 0, f"{failures}/5 misplaced poles"


def check_cross_equivalence(rng, threads):
    details = []
    passed = True
    top = max(EXTEND_DEGREES)
    for name, expected in CORPUS.items():
        phi = resolve_phi(f"builtin:{name}", 256)
        z = 0.2 if name == "exp_cos" else 0.5
        rule = quotient_rule(phi, top)
        module = classify_module(phi, [z], rule, threads=threads)[0]
        extend = extendability_score(phi, EXTEND_DEGREES)
        bounded = module.verdict == "bounded"
        consistent = extend.verdict == "meromorphic-consistent"
        agrees = bounded == expected and consistent == expected

        exact = builtin_extension(name)
        if expected and exact is not None:
            target = complex(exact(z))
            agrees = agrees and abs(module.lam - target) <= QUOTIENT_TOL * max(1.0, abs(target))

        passed = passed and agrees
        marker = "" if agrees else " (mismatch)"
        details.append(f"{name}: λ={module.lam:.8g} {module.verdict}/{extend.verdict}{marker}")
    return passed, "; ".join(details)


def check_pole_order(rng, threads):
    radii = [0.3, 0.4, 0.5, 0.6, 0.7]
    pole = pole_order_fit(builtin_phi("pole_m", 512, m=2), radii, 4, 6, threads=threads)
    zero = pole_order_fit(builtin_phi("zero", 512), radii, 4, 6, threads=threads)
    passed = 1.75 <= pole.m_hat <= 2.25 and -0.05 <= zero.m_hat <= 0.05
    return passed, f"pole_2 slope {pole.m_hat:.6g}, zero slope {zero.m_hat:.6g}"


def check_hull_slice(rng, threads):
    zero = hull_slice(builtin_phi("zero", 256), 0.5, [0, 0.3, -0.3, 0.6, -0.6], 6, threads=threads)
    finite = [math.isfinite(v) for v in zero.values]
    zero_ok = finite == [True, False, False, False, False]

    grid = [5.5, 6.0, 6.25, 6.5, 7.0]
    pole = hull_slice(builtin_phi("pole_m", 256, m=2), 0.4, grid, 6, threads=threads)
    on_graph = pole.values[2]
    others = [v for i, v in enumerate(pole.values) if i != 2]
    pole_ok = abs(on_graph + 2 * math.log(0.4)) <= 0.02 and all(v > on_graph for v in others)
    return zero_ok and pole_ok, f"zero slice {zero.values}; pole_2 slice {pole.values}"


def check_bracket_soundness(rng, threads):
    failures = 0
    for _ in range(INSTANCES):
        n = int(rng.integers(1, 4))
        m = int(rng.integers(3, 13))
        A = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
        L = rng.normal(size=n) + 1j * rng.normal(size=n)
        prog = ModulusProgram(L, A, phase_count=16)
        bracket = max_modulus(prog)
        w = bracket.witness
        ok = (
            bracket.status is Status.BOUNDED
            and np.max(np.abs(A @ w)) <= 1 + 1e-9
            and abs(L @ w) >= bracket.lb * (1 - 1e-9)
            and bracket.lb <= bracket.ub
            and bracket.ub <= bracket.lb * prog.ratio_bound + 1e-9
        )
        failures += not ok
    return failures == 0, f"{failures}/{INSTANCES} failures"


def check_graph_witness(rng, threads):
    phi = builtin_phi("pole_m", 64, m=2)
    K = graph_set(phi)
    failures = 0
    for _ in range(INSTANCES):
        z = rng.uniform(0.2, 0.8) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        w = z**-2 + rng.normal() * 0.1
        estimate = extremal_at(K, (z, w), 2)
        for degree, witness in estimate.witnesses.items():
            failures += sup_norm(witness, K) > 1 + 1e-9
    return failures == 0, f"{failures} infeasible witnesses"


def _random_points(rng, count: int) -> np.ndarray:
    return rng.uniform(0.5, 1.0, count) * np.exp(1j * rng.uniform(0, 2 * np.pi, count))


def _outside_point(rng) -> complex:
    return complex(rng.uniform(1.2, 2.0) * np.exp(1j * rng.uniform(0, 2 * np.pi)))


def check_degree_monotonicity(rng, threads):
    failures = 0
    for _ in range(INSTANCES):
        K = SampledSet.from_points(_random_points(rng, 12))
        z = _outside_point(rng)
        failures += extremal_at(K, z, 3).value < extremal_at(K, z, 2).value
    return failures == 0, f"{failures}/{INSTANCES} failures"


def check_set_monotonicity(rng, threads):
    failures = 0
    for _ in range(INSTANCES):
        points = _random_points(rng, 16)
        z = _outside_point(rng)
        small = extremal_at(SampledSet.from_points(points[:10]), z, 3)
        large = extremal_at(SampledSet.from_points(points), z, 3)
        failures += any(
            small.curve.upper(d) < large.curve.lower(d) - 1e-9 for d in small.curve.degrees
        )
    return failures == 0, f"{failures}/{INSTANCES} failures"


def check_rotation(rng, threads):
    K = SampledSet.circle(32)
    failures = 0
    for _ in range(INSTANCES):
        rho = complex(np.exp(1j * rng.uniform(0, 2 * np.pi)))
        z = complex(rng.uniform(0.2, 2.0) * np.exp(1j * rng.uniform(0, 2 * np.pi)))
        base = extremal_at(K, z, 3)
        turned = extremal_at(K.rotated(rho), rho * z, 3)
        failures += not all(
            _overlap(base.brackets[d], turned.brackets[d]) for d in base.curve.degrees
        )
    return failures == 0, f"{failures}/{INSTANCES} failures"


def _random_boundary(rng, count: int) -> BoundaryFunction:
    freqs = np.arange(-3, 4)
    weights = rng.normal(size=freqs.size) + 1j * rng.normal(size=freqs.size)
    theta = 2 * np.pi * np.arange(count) / count
    return BoundaryFunction(np.exp(1j * np.outer(theta, freqs)) @ weights, name="random")


def check_scalar_invariance(rng, threads):
    failures = 0
    for _ in range(INSTANCES):
        phi = _random_boundary(rng, 32)
        c = complex(rng.normal(), rng.normal())
        lam = complex(rng.normal(), rng.normal())
        z = complex(rng.uniform(0.1, 0.8) * np.exp(1j * rng.uniform(0, 2 * np.pi)))
        base = module_constant(ModuleQuery(phi, z, lam, 2))
        scaled = module_constant(ModuleQuery(phi.scaled(c), z, c * lam, 2))
        failures += not _overlap(base, scaled)
    return failures == 0, f"{failures}/{INSTANCES} failures"


def check_gauge_invariance(rng, threads):
    failures = 0
    for _ in range(INSTANCES):
        phi = _random_boundary(rng, 64)
        c = complex(np.exp(1j * rng.uniform(0, 2 * np.pi)))
        base = annihilator(phi, 2)
        turned = annihilator(phi.scaled(c), 2)
        scale = max(1.0, float(np.linalg.norm(base.l_coeffs)))
        ok = (
            abs(base.residual - turned.residual) <= 1e-10
            and np.max(np.abs(turned.l_coeffs - c * base.l_coeffs)) <= 1e-10 * scale
        )
        poles, moved = pole_candidates(base), pole_candidates(turned)
        ok = ok and len(poles) == len(moved)
        ok = ok and all(abs(a - b) <= 1e-8 for (a, _), (b, _) in zip(poles, moved))
        failures += not ok
    return failures == 0, f"{failures}/{INSTANCES} failures"


def check_parseval(rng, threads):
    failures = 0
    for _ in range(INSTANCES):
        count = int(2 ** rng.integers(4, 9))
        phi = BoundaryFunction(rng.normal(size=count) + 1j * rng.normal(size=count))
        energy = np.mean(np.abs(phi.samples) ** 2)
        spectrum = np.sum(np.abs(phi.coeffs) ** 2)
        roundtrip = np.max(np.abs(phi.synthesize() - phi.samples)) / phi.sup_norm()
        failures += abs(energy - spectrum) > 1e-12 * energy or roundtrip > 1e-12
    return failures == 0, f"{failures}/{INSTANCES} failures"


def check_rerun_identity(rng, threads):
    K = SampledSet.circle(64)
    nodes = [complex(z) for z in _random_points(rng, 4) * 2.0]
    contents = []
    with tempfile.TemporaryDirectory() as scratch:
        for attempt in range(2):
            sweep = extremal_grid(K, nodes, 3, threads=threads)
            target = write_csv(
                path.join(scratch, str(attempt)),
                "extremal.csv",
                EXTREMAL_HEADER,
                extremal_rows(sweep),
            )
            with open(target, "rb") as stream:
                contents.append(stream.read())
    return contents[0] == contents[1], f"{len(contents[0])} bytes per run"


CHECKS: dict[str, Callable] = {
    "extremal-circle": check_extremal_circle,
    "extremal-interval": check_extremal_interval,
    "module-exact": check_module_exact,
    "rudin": check_rudin,
    "quotient": check_quotient,
    "mobius": check_mobius,
    "cross-equivalence": check_cross_equivalence,
    "pole-order": check_pole_order,
    "hull-slice": check_hull_slice,
    "bracket-soundness": check_bracket_soundness,
    "graph-witness": check_graph_witness,
    "degree-monotonicity": check_degree_monotonicity,
    "set-monotonicity": check_set_monotonicity,
    "rotation": check_rotation,
    "scalar-invariance": check_scalar_invariance,
    "gauge-invariance": check_gauge_invariance,
    "parseval": check_parseval,
    "rerun-identity": check_rerun_identity,
}


def run_corpus(seed: int = 0, threads: int = 1, names=None) -> list[CheckResult]:
    """Run the named checks (all by default); exceptions count as failures."""
    unknown = sorted(set(names or ()) - set(CHECKS))
    if unknown:
        raise ValueError(f"Unknown corpus checks: {', '.join(unknown)}")

    order = list(CHECKS)
    results = []
    for name in names or order:
        check = CHECKS[name]
        rng = np.random.default_rng([seed, order.index(name)])
        started_at = perf_counter()
        try:
            passed, detail = check(rng, threads)
        except Exception as exc:
            logger.debug("Check %s raised", name, exc_info=True)
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        logger.debug("%s finished in %.1fs", name, perf_counter() - started_at)
        results.append(CheckResult(name, bool(passed), detail))
    return results
