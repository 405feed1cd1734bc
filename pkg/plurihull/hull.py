"""Projective-hull diagnostics for graphs of circle data.

Points (z, w) with 0 < |z| < 1 are evaluated with the extremal function of the
sampled graph γ = {(ζ, φ(ζ))}. Along the interior graph w = h(z) the value is
expected to be finite and harmonic in z, with growth -m·log|z| at a pole of
order m.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .core import BoundaryFunction, SampledSet
from .extend import CLUSTER_RADIUS, annihilator, pole_candidates, quotient_rule
from .extremal import ExtremalEstimate, HullSlice, extremal_at, extremal_grid
from .optimize import SolverOptions


logger = logging.getLogger(__name__)

__all__ = [
    "HullSlice",
    "OffHullError",
    "PoleOrderFit",
    "graph_point_estimate",
    "graph_set",
    "harmonicity_residual",
    "hull_slice",
    "order_cross_check",
    "pole_order_fit",
]

DEFAULT_QUOTIENT_DEGREE = 4


class OffHullError(ValueError):
    """Raised when a node of a harmonicity or pole-order grid has an unbounded value."""

    def __init__(self, location):
        super().__init__(f"off-hull node at {location}")
        self.location = location


@dataclass(frozen=True)
class PoleOrderFit:
    radii: tuple[float, ...]
    circle_means: tuple[float, ...]
    m_hat: float
    intercept: float
    max_laplacian_residual: float | None = None

    @property
    def order(self) -> int:
        return max(0, round(self.m_hat))


def graph_set(phi: BoundaryFunction) -> SampledSet:
    """The sampled graph {(e^{iθ_j}, φ(e^{iθ_j}))} in C^2."""
    return SampledSet(
        np.column_stack([phi.points, phi.samples]),
        label=f"graph:{phi.name}",
        circle_samples=phi.N,
    )


def _check_punctured(z: complex):
    if not 0.0 < abs(z) < 1.0:
        raise ValueError(f"Point must satisfy 0 < |z| < 1, got {z}")


def _default_rule(phi: BoundaryFunction, w_rule: Callable | None) -> Callable:
    return w_rule or quotient_rule(phi, DEFAULT_QUOTIENT_DEGREE)


def graph_point_estimate(
    phi: BoundaryFunction,
    z: complex,
    w: complex,
    d_max: int,
    *,
    phase_count: int = 64,
    options: SolverOptions | None = None,
) -> ExtremalEstimate:
    """Extremal function of the graph at (z, w)."""
    _check_punctured(complex(z))
    return extremal_at(graph_set(phi), (z, w), d_max, phase_count=phase_count, options=options)


def _graph_values(
    phi: BoundaryFunction,
    zs: np.ndarray,
    d_max: int,
    w_rule: Callable,
    *,
    threads: int,
    phase_count: int,
    options: SolverOptions | None,
) -> np.ndarray:
    """Values along w = w_rule(z) for an array of z; any unbounded node is fatal."""
    flat = zs.reshape(-1)
    nodes = [(complex(z), complex(w_rule(complex(z)))) for z in flat]
    sweep = extremal_grid(
        graph_set(phi), nodes, d_max, threads=threads, phase_count=phase_count, options=options
    )
    for node, error in zip(nodes, sweep.errors):
        if error is not None:
            raise ValueError(f"Graph node {node} failed: {error}")
    values = np.array(sweep.values)
    infinite = np.flatnonzero(~np.isfinite(values))
    if infinite.size:
        raise OffHullError(nodes[int(infinite[0])])
    return values.reshape(zs.shape)


def _fit(radii: np.ndarray, means: np.ndarray) -> tuple[float, float]:
    design = np.column_stack([-np.log(radii), np.ones_like(radii)])
    (slope, intercept), *_ = np.linalg.lstsq(design, means, rcond=None)
    return float(slope), float(intercept)


def _polar_laplacian_residual(values: np.ndarray, radii: np.ndarray) -> float:
    """max over interior nodes of h_r² |Δ_h v| on a polar grid periodic in θ."""
    h_r = radii[1] - radii[0]
    h_t = 2.0 * np.pi / values.shape[1]
    inner = values[1:-1]
    r = radii[1:-1, None]
    v_rr = (values[2:] - 2.0 * inner + values[:-2]) / h_r**2
    v_r = (values[2:] - values[:-2]) / (2.0 * h_r)
    v_tt = (np.roll(inner, -1, axis=1) - 2.0 * inner + np.roll(inner, 1, axis=1)) / h_t**2
    laplacian = v_rr + v_r / r + v_tt / r**2
    return float(np.max(np.abs(laplacian)) * h_r**2)


def harmonicity_residual(
    phi: BoundaryFunction,
    annulus: tuple[float, float, int, int],
    d_max: int,
    *,
    w_rule: Callable | None = None,
    threads: int = 1,
    phase_count: int = 64,
    options: SolverOptions | None = None,
) -> PoleOrderFit:
    """Polar five-point Laplacian of v(z) = V_γ(z, w(z)) over r0 <= |z| <= r1."""
    r0, r1, n_r, n_theta = annulus
    if not 0.0 < r0 < r1 < 1.0:
        raise ValueError(f"Annulus radii must satisfy 0 < r0 < r1 < 1, got ({r0}, {r1})")
    if n_r < 3:
        raise ValueError(f"Need at least 3 radii for interior nodes, got {n_r}")
    if n_theta < 32:
        raise ValueError(f"Need at least 32 angles, got {n_theta}")

    radii = np.linspace(r0, r1, int(n_r))
    theta = 2.0 * np.pi * np.arange(int(n_theta)) / n_theta
    zs = radii[:, None] * np.exp(1j * theta)[None, :]
    values = _graph_values(
        phi,
        zs,
        d_max,
        _default_rule(phi, w_rule),
        threads=threads,
        phase_count=phase_count,
        options=options,
    )

    means = values.mean(axis=1)
    m_hat, intercept = _fit(radii, means)
    residual = _polar_laplacian_residual(values, radii)
    logger.debug("Laplacian residual %.3g on %d x %d grid", residual, n_r, n_theta)
    return PoleOrderFit(tuple(radii), tuple(means), m_hat, intercept, residual)


def pole_order_fit(
    phi: BoundaryFunction,
    radii: Sequence[float],
    n_theta: int = 8,
    d_max: int = 6,
    *,
    w_rule: Callable | None = None,
    threads: int = 1,
    phase_count: int = 64,
    options: SolverOptions | None = None,
) -> PoleOrderFit:
    """Least-squares fit of circle means of V_γ along the graph against -log r."""
    radii = np.asarray(radii, dtype=float)
    if radii.size < 3:
        raise ValueError(f"Need at least 3 radii, got {radii.size}")
    if np.any(radii <= 0.0) or np.any(radii >= 1.0) or np.any(np.diff(radii) <= 0.0):
        raise ValueError(f"Radii must be strictly increasing inside (0, 1), got {radii.tolist()}")
    if n_theta < 1:
        raise ValueError(f"Need at least one angle per circle, got {n_theta}")

    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    zs = radii[:, None] * np.exp(1j * theta)[None, :]
    values = _graph_values(
        phi,
        zs,
        d_max,
        _default_rule(phi, w_rule),
        threads=threads,
        phase_count=phase_count,
        options=options,
    )

    means = values.mean(axis=1)
    m_hat, intercept = _fit(radii, means)
    logger.debug("Pole-order slope %.6g, intercept %.6g", m_hat, intercept)
    return PoleOrderFit(tuple(radii.tolist()), tuple(means.tolist()), m_hat, intercept)


def _summary(values: list[float], on_graph: int) -> float | None:
    off = [v for i, v in enumerate(values) if i != on_graph and not math.isnan(v)]
    if not off:
        return None
    on = values[on_graph]
    median = float(np.median(off))
    if math.isinf(median):
        return 0.0
    if median == 0.0:
        return 1.0 if on == 0.0 else math.inf
    return on / median


def hull_slice(
    phi: BoundaryFunction,
    z0: complex,
    w_grid: Sequence[complex],
    d_max: int,
    *,
    w_rule: Callable | None = None,
    threads: int = 1,
    phase_count: int = 64,
    options: SolverOptions | None = None,
) -> HullSlice:
    """Graph estimates along {z0} x w_grid, summarized against the graph value h(z0)."""
    z0 = complex(z0)
    _check_punctured(z0)
    nodes = [(z0, complex(w)) for w in w_grid]
    sweep = extremal_grid(
        graph_set(phi), nodes, d_max, threads=threads, phase_count=phase_count, options=options
    )
    if not nodes:
        return replace(sweep, z0=z0)

    h0 = _default_rule(phi, w_rule)(z0)
    on_graph = int(np.argmin([abs(w - h0) for _, w in nodes]))
    summary = _summary(sweep.values, on_graph)
    logger.debug("Slice at z0=%s: graph node %d, summary %s", z0, on_graph, summary)
    return replace(sweep, z0=z0, summary=summary)


def order_cross_check(
    phi: BoundaryFunction, fit: PoleOrderFit, d_k: int = DEFAULT_QUOTIENT_DEGREE
) -> tuple[int, int]:
    """Fitted pole order next to the annihilator's pole multiplicity at the origin."""
    poles = pole_candidates(annihilator(phi, d_k))
    at_origin = sum(mult for location, mult in poles if abs(location) <= CLUSTER_RADIUS)
    return fit.order, at_origin
