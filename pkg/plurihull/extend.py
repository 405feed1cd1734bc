"""Annihilating multipliers: analytic k with φ·k analytic on the circle, so φ = ℓ/k there."""

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .core import BoundaryFunction, DegreeCurve


logger = logging.getLogger(__name__)

DEFAULT_DEGREES = (2, 4, 8)
NULL_TOL = 1e-11
EPS_DIV = 1e-10
POLE_MARGIN = 1e-6
CLUSTER_RADIUS = 1e-4
REMOVABLE_TOL = 1e-8
TRIM_TOL = 1e-13
EPS_RES = 1e-8
STABILITY_TOL = 1e-3
PLATEAU_FACTOR = 1e3


class NearPoleError(ValueError):
    """Raised when the quotient is evaluated where its denominator (nearly) vanishes."""

    def __init__(self, z: complex, denominator: float):
        super().__init__(f"near pole at z={z}: |k(z)| = {denominator:.3g}")
        self.z = z
        self.denominator = denominator


@dataclass(frozen=True)
class QuotientModel:
    k_coeffs: np.ndarray
    l_coeffs: np.ndarray
    residual: float
    d_k: int
    n_neg: int
    flags: tuple[str, ...] = ()

    @property
    def is_degenerate(self) -> bool:
        return "degenerate" in self.flags


@dataclass(frozen=True)
class ExtendabilityReport:
    curve: DegreeCurve
    verdict: str
    models: dict[int, QuotientModel] = field(default_factory=dict)
    poles: dict[int, list[tuple[complex, int]]] = field(default_factory=dict)


def hankel_matrix(phi: BoundaryFunction, d_k: int, n_neg: int) -> np.ndarray:
    """Entry (n-1, j) is φ̂(-n-j), mapping k to the negative frequencies of φ·k."""
    n = np.arange(1, n_neg + 1)[:, None]
    j = np.arange(d_k + 1)[None, :]
    half = phi.N // 2
    return phi.coeffs[half - n - j]


def default_n_neg(N: int, d_k: int) -> int:
    return min(4 * d_k, N // 2 - d_k)


def _lowest_degree_member(null_basis: np.ndarray) -> np.ndarray:
    """Combination of null-space columns whose top coefficients vanish."""
    rank = null_basis.shape[1]
    top = null_basis[-(rank - 1) :, :]
    _, _, vh = np.linalg.svd(top)
    return null_basis @ vh[-1].conj()


def _gauge(k: np.ndarray) -> np.ndarray:
    k = k / np.linalg.norm(k)
    lead = k[int(np.argmax(np.abs(k)))]
    return k * (np.conj(lead) / abs(lead))


def annihilator(
    phi: BoundaryFunction,
    d_k: int,
    n_neg: int | None = None,
    *,
    null_tol: float = NULL_TOL,
) -> QuotientModel:
    """Smallest right singular vector k of the negative-frequency map and ℓ = (φ·k)_+."""
    if d_k < 1:
        raise ValueError(f"Denominator degree must be >= 1, got {d_k}")
    if n_neg is None:
        n_neg = default_n_neg(phi.N, d_k)
    if n_neg < d_k:
        raise ValueError(f"n_neg = {n_neg} must be at least d_k = {d_k}")
    if phi.N < 4 * (d_k + n_neg):
        raise ValueError(
            f"d_k = {d_k} with n_neg = {n_neg} is too large for N = {phi.N} "
            f"(need N >= {4 * (d_k + n_neg)})"
        )

    if phi.is_zero():
        k = np.zeros(d_k + 1, dtype=complex)
        k[0] = 1.0
        l = np.zeros(phi.N // 2 + d_k, dtype=complex)
        return QuotientModel(k, l, 0.0, d_k, n_neg, ("degenerate",))

    H = hankel_matrix(phi, d_k, n_neg)
    _, singular, vh = np.linalg.svd(H, full_matrices=True)
    singular = np.concatenate([singular, np.zeros(d_k + 1 - singular.size)])

    threshold = null_tol * max(1.0, phi.l2_norm())
    nullity = int(np.count_nonzero(singular <= threshold))
    if nullity > 1:
        k = _lowest_degree_member(vh[-nullity:].conj().T)
        logger.debug("Null space of dimension %d at d_k=%d, taking lowest degree", nullity, d_k)
    else:
        k = vh[-1].conj()

    k = _gauge(k)
    l = np.convolve(phi.coeffs, k)[phi.N // 2 :]
    return QuotientModel(k, l, float(singular[-1]), d_k, n_neg)


def recompute_residual(phi: BoundaryFunction, model: QuotientModel) -> float:
    """‖H·k‖₂ computed directly from the Fourier coefficients."""
    return float(np.linalg.norm(hankel_matrix(phi, model.d_k, model.n_neg) @ model.k_coeffs))


def evaluate_quotient(model: QuotientModel, z: complex, *, eps_div: float = EPS_DIV) -> complex:
    """h(z) = ℓ(z)/k(z)."""
    denominator = complex(P.polyval(z, model.k_coeffs))
    if abs(denominator) <= eps_div * np.linalg.norm(model.k_coeffs):
        raise NearPoleError(complex(z), abs(denominator))
    return complex(P.polyval(z, model.l_coeffs)) / denominator


def quotient_rule(phi: BoundaryFunction, d_k: int, n_neg: int | None = None) -> Callable:
    """λ(z) = h(z) from the annihilator of degree d_k."""
    model = annihilator(phi, d_k, n_neg)
    return lambda z: evaluate_quotient(model, z)


def _trimmed(coeffs: np.ndarray) -> np.ndarray:
    cutoff = TRIM_TOL * np.max(np.abs(coeffs))
    keep = np.flatnonzero(np.abs(coeffs) > cutoff)
    return coeffs[: keep[-1] + 1] if keep.size else coeffs[:1]


def pole_candidates(
    model: QuotientModel,
    *,
    margin: float = POLE_MARGIN,
    cluster_radius: float = CLUSTER_RADIUS,
    removable_tol: float = REMOVABLE_TOL,
) -> list[tuple[complex, int]]:
    """Interior zeros of k, clustered, with zeros shared by ℓ dropped as removable."""
    k = _trimmed(model.k_coeffs)
    if k.size < 2:
        return []

    roots = np.linalg.eigvals(P.polycompanion(k))
    roots = roots[np.abs(roots) < 1.0 - margin]

    l_scale = max(1.0, float(np.linalg.norm(model.l_coeffs)))
    roots = [r for r in roots if abs(P.polyval(r, model.l_coeffs)) > removable_tol * l_scale]

    clusters: list[list[complex]] = []
    for root in sorted(roots, key=lambda r: (abs(r), np.angle(r))):
        for cluster in clusters:
            if abs(root - np.mean(cluster)) <= cluster_radius:
                cluster.append(root)
                break
        else:
            clusters.append([root])

    poles = [(complex(np.mean(cluster)), len(cluster)) for cluster in clusters]
    return sorted(poles, key=lambda pole: (abs(pole[0]), np.angle(pole[0])))


def _poles_match(first, second, tol: float) -> bool:
    if len(first) != len(second):
        return False
    if [m for _, m in first] != [m for _, m in second]:
        return False
    return all(abs(a - b) <= tol for (a, _), (b, _) in zip(first, second))


def extendability_score(
    phi: BoundaryFunction,
    d_list: Sequence[int] = DEFAULT_DEGREES,
    *,
    eps_res: float | None = None,
    stability_tol: float = STABILITY_TOL,
    plateau_factor: float = PLATEAU_FACTOR,
    null_tol: float = NULL_TOL,
    pole_options: dict | None = None,
) -> ExtendabilityReport:
    """Residual curve over d_list with a three-valued extendability verdict."""
    d_list = [int(d) for d in d_list]
    if not d_list or any(b <= a for a, b in zip(d_list, d_list[1:])):
        raise ValueError(f"Degree list must be increasing, got {d_list}")
    eps = EPS_RES * phi.l2_norm() if eps_res is None else eps_res

    curve = DegreeCurve()
    models: dict[int, QuotientModel] = {}
    poles: dict[int, list[tuple[complex, int]]] = {}
    for d_k in d_list:
        model = annihilator(phi, d_k, null_tol=null_tol)
        models[d_k] = model
        poles[d_k] = pole_candidates(model, **(pole_options or {}))
        curve.add(d_k, model.residual, model.residual)

    residuals = [models[d].residual for d in d_list]
    counts = [sum(m for _, m in poles[d]) for d in d_list]
    stable = len(d_list) < 2 or _poles_match(poles[d_list[-2]], poles[d_list[-1]], stability_tol)
    growing = any(a < b < c for a, b, c in zip(counts, counts[1:], counts[2:]))

    if min(residuals) <= eps and stable:
        verdict = "meromorphic-consistent"
    elif growing or min(residuals) > plateau_factor * eps:
        verdict = "not-extendable"
    else:
        verdict = "inconclusive"

    logger.debug("Extendability residuals %s, pole counts %s: %s", residuals, counts, verdict)
    return ExtendabilityReport(curve, verdict, models, poles)
