from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial
from numpy.polynomial import chebyshev as cheb
from numpy.polynomial import polynomial as P

from .core import SampledSet


@dataclass(frozen=True)
class Poly1:
    """Polynomial in z, monomial coefficients c_0..c_d. The degree is an upper bound."""

    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if coeffs.ndim != 1 or not np.all(np.isfinite(coeffs)):
            raise ValueError("Poly1 coefficients must be a finite 1-D array")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    arity = 1


@dataclass(frozen=True)
class Poly2:
    """Polynomial in (z, w); coeffs[j, k] multiplies z^j w^k, zero above total degree d."""

    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.atleast_2d(np.asarray(self.coeffs, dtype=complex))
        if coeffs.ndim != 2 or coeffs.shape[0] != coeffs.shape[1]:
            raise ValueError("Poly2 coefficients must be a square array")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("Poly2 coefficients must be finite")
        j, k = np.indices(coeffs.shape)
        if np.any(coeffs[j + k > coeffs.shape[0] - 1]):
            raise ValueError("Poly2 has terms above its total degree bound")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    arity = 2


def eval1(p: Poly1, z):
    """Horner evaluation of a one-variable polynomial."""
    return P.polyval(z, p.coeffs)


def eval2(p: Poly2, z, w):
    """Nested Horner evaluation in z and w."""
    return P.polyval2d(z, w, p.coeffs)


def evaluate(p: Poly1 | Poly2, points: np.ndarray) -> np.ndarray:
    """Evaluate p at the rows of a (m, dim) point array."""
    points = np.asarray(points, dtype=complex)
    if points.ndim == 1:
        points = points[:, None]
    if points.shape[1] != p.arity:
        raise ValueError(
            f"Dimension mismatch: {p.arity}-variable polynomial on {points.shape[1]}-D points"
        )
    if p.arity == 1:
        return eval1(p, points[:, 0])
    return eval2(p, points[:, 0], points[:, 1])


def sup_norm(p: Poly1 | Poly2, K: SampledSet) -> float:
    """Maximum modulus of p over the sample points of K."""
    if K.dim != p.arity:
        raise ValueError(f"Dimension mismatch: {p.arity}-variable polynomial on a {K.dim}-D set")
    return float(np.max(np.abs(evaluate(p, K.points))))


def scale(p: Poly1 | Poly2, factor: complex):
    return type(p)(p.coeffs * factor)


def monomial_exponents(degree: int, dim: int) -> list[tuple[int, ...]]:
    """Exponents of all monomials of total degree <= degree, graded order."""
    if dim == 1:
        return [(j,) for j in range(degree + 1)]
    return [(total - k, k) for total in range(degree + 1) for k in range(total + 1)]


def basis_size(degree: int, dim: int) -> int:
    return degree + 1 if dim == 1 else (degree + 1) * (degree + 2) // 2


def monomial_matrix(points: np.ndarray, degree: int) -> np.ndarray:
    """Rows of monomial values at each point; columns follow monomial_exponents."""
    points = np.asarray(points, dtype=complex)
    if points.ndim == 1:
        points = points[:, None]
    if points.shape[1] == 1:
        return P.polyvander(points[:, 0], degree)

    zpow = P.polyvander(points[:, 0], degree)
    wpow = P.polyvander(points[:, 1], degree)
    return np.column_stack([zpow[:, j] * wpow[:, k] for j, k in monomial_exponents(degree, 2)])


def chebyshev_matrix(points: np.ndarray, degree: int, interval: tuple[float, float]) -> np.ndarray:
    """Chebyshev values T_j(t) with t the affine image of the points onto [-1, 1]."""
    a, b = interval
    t = (2.0 * np.asarray(points, dtype=complex).reshape(-1) - a - b) / (b - a)
    return cheb.chebvander(t, degree)


def from_monomial_vector(coeffs: np.ndarray, degree: int, dim: int) -> Poly1 | Poly2:
    """Build a polynomial from a coefficient vector ordered as monomial_exponents."""
    if dim == 1:
        return Poly1(coeffs)
    grid = np.zeros((degree + 1, degree + 1), dtype=complex)
    for value, (j, k) in zip(coeffs, monomial_exponents(degree, 2)):
        grid[j, k] = value
    return Poly2(grid)


def from_chebyshev_vector(coeffs: np.ndarray, interval: tuple[float, float]) -> Poly1:
    """Convert a Chebyshev series on an interval to monomial coefficients in z."""
    series = Chebyshev(np.asarray(coeffs, dtype=complex), domain=list(interval))
    return Poly1(series.convert(kind=Polynomial).coef)
