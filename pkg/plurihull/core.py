import csv
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np


MIN_SAMPLES = 16
GRID_TOLERANCE = 1e-9

BUILTIN_NAMES = ("inverse", "pole_m", "cos", "exp_cos", "abs_sin", "zero")

# Corpus of boundary data paired with the expected behaviour of its extension.
# Names use the CLI spelling (`pole_2` is `pole_m` with m = 2).
CORPUS = {
    "zero": True,
    "inverse": True,
    "pole_2": True,
    "cos": True,
    "exp_cos": False,
    "abs_sin": False,
}


class BoundaryFormatError(ValueError):
    """Raised when circle samples cannot be ingested."""


def _is_power_of_two(value: int) -> bool:
    return value > 0 and value & (value - 1) == 0


def _frozen_array(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype)
    array.flags.writeable = False
    return array


def uniform_angles(count: int) -> np.ndarray:
    """Angles 2πj/N of the uniform circle grid."""
    return 2.0 * np.pi * np.arange(count) / count


@dataclass(frozen=True)
class BoundaryFunction:
    """Uniform samples of a continuous function on the unit circle."""

    samples: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        if samples.ndim != 1:
            raise BoundaryFormatError("Boundary samples must be one-dimensional")
        if not _is_power_of_two(samples.size) or samples.size < MIN_SAMPLES:
            raise BoundaryFormatError(
                f"Sample count must be a power of two >= {MIN_SAMPLES}, got {samples.size}"
            )
        if not np.all(np.isfinite(samples)):
            raise BoundaryFormatError("Boundary samples contain NaN or Inf")
        object.__setattr__(self, "samples", _frozen_array(samples, complex))

    @property
    def N(self) -> int:
        return int(self.samples.size)

    @property
    def theta(self) -> np.ndarray:
        return uniform_angles(self.N)

    @property
    def points(self) -> np.ndarray:
        return np.exp(1j * self.theta)

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(-self.N // 2, self.N // 2)

    @cached_property
    def coeffs(self) -> np.ndarray:
        """Fourier coefficients for n = -N/2 .. N/2-1, with φ̂(n) = (1/N) Σ φ_j e^{-inθ_j}."""
        return _frozen_array(np.fft.fftshift(np.fft.fft(self.samples) / self.N), complex)

    def coefficient(self, n: int) -> complex:
        """Return φ̂(n), or zero outside the resolved band."""
        half = self.N // 2
        if -half <= n < half:
            return complex(self.coeffs[n + half])
        return 0j

    def synthesize(self) -> np.ndarray:
        """Inverse transform of the coefficients back to samples."""
        return np.fft.ifft(np.fft.ifftshift(self.coeffs) * self.N)

    def evaluate(self, theta) -> np.ndarray:
        """Trigonometric interpolant of the samples at arbitrary angles."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        half = self.N // 2
        values = np.exp(1j * np.outer(theta, np.arange(-half + 1, half))) @ self.coeffs[1:]
        # Nyquist mode split evenly between ±N/2
        return values + self.coeffs[0] * np.cos(half * theta)

    def l2_norm(self) -> float:
        return float(np.sqrt(np.mean(np.abs(self.samples) ** 2)))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def is_zero(self) -> bool:
        return not np.any(self.samples)

    def scaled(self, factor: complex) -> "BoundaryFunction":
        return BoundaryFunction(self.samples * factor, name=f"{self.name}*c")

    def rotated(self, steps: int) -> "BoundaryFunction":
        """Return θ ↦ φ(θ + 2π·steps/N)."""
        return BoundaryFunction(np.roll(self.samples, -steps), name=f"{self.name}@{steps}")


@dataclass(frozen=True)
class SampledSet:
    """Finite point cloud standing in for a compact set in C^1 or C^2."""

    points: np.ndarray
    label: str = "points"
    circle_samples: int | None = None

    def __post_init__(self):
        points = np.asarray(self.points, dtype=complex)
        if points.ndim == 1:
            points = points[:, None]
        if points.ndim != 2 or points.shape[0] == 0:
            raise ValueError("A sampled set needs at least one point")
        if points.shape[1] not in (1, 2):
            raise ValueError(f"Unsupported dimension: {points.shape[1]}")
        if not np.all(np.isfinite(points)):
            raise ValueError("Sampled set contains non-finite coordinates")
        object.__setattr__(self, "points", _frozen_array(points, complex))

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    def __len__(self):
        return int(self.points.shape[0])

    @property
    def is_real_interval(self) -> bool:
        """True for one-dimensional sets on the real line with positive extent."""
        if self.dim != 1 or len(self) < 2:
            return False
        coords = self.points[:, 0]
        return bool(np.all(coords.imag == 0.0) and np.ptp(coords.real) > 0.0)

    @property
    def interval(self) -> tuple[float, float]:
        coords = self.points[:, 0].real
        return float(coords.min()), float(coords.max())

    def rotated(self, rho: complex) -> "SampledSet":
        """Rotate every coordinate by the unimodular factor rho."""
        return SampledSet(self.points * rho, label=f"{self.label}*rot", circle_samples=None)

    def union(self, other: "SampledSet") -> "SampledSet":
        return SampledSet(np.vstack([self.points, other.points]), label=f"{self.label}+")

    @classmethod
    def circle(cls, count: int) -> "SampledSet":
        return cls(np.exp(1j * uniform_angles(count)), label="circle", circle_samples=count)

    @classmethod
    def chebyshev_interval(cls, count: int, a: float = -1.0, b: float = 1.0) -> "SampledSet":
        nodes = np.cos(np.pi * (np.arange(count) + 0.5) / count)
        return cls(0.5 * (a + b) + 0.5 * (b - a) * nodes + 0j, label="interval")

    @classmethod
    def from_points(cls, points) -> "SampledSet":
        return cls(np.asarray(points, dtype=complex))


@dataclass
class DegreeCurve:
    """Degree-indexed brackets (lb, ub) with a status per degree."""

    entries: dict[int, tuple[float, float]] = field(default_factory=dict)
    statuses: dict[int, str] = field(default_factory=dict)

    def add(self, degree: int, lb: float, ub: float, status: str = "bounded"):
        if degree < 1:
            raise ValueError(f"Degrees start at 1, got {degree}")
        if lb > ub:
            raise ValueError(f"Bracket lower bound {lb} exceeds upper bound {ub}")
        self.entries[degree] = (float(lb), float(ub))
        self.statuses[degree] = str(status)

    @property
    def degrees(self) -> list[int]:
        return sorted(self.entries)

    def lower(self, degree: int) -> float:
        return self.entries[degree][0]

    def upper(self, degree: int) -> float:
        return self.entries[degree][1]

    def running_max_lower(self) -> list[float]:
        best = -math.inf
        running = []
        for degree in self.degrees:
            best = max(best, self.entries[degree][0])
            running.append(best)
        return running

    def mapped(self, transform: Callable[[float], float]) -> "DegreeCurve":
        curve = DegreeCurve()
        for degree in self.degrees:
            lb, ub = self.entries[degree]
            curve.add(degree, transform(lb), transform(ub), self.statuses[degree])
        return curve


def load_boundary(path: str, columns: tuple[str, str, str] = ("theta", "re", "im")):
    """Load circle samples from a `theta,re,im` CSV file."""
    theta_key, re_key, im_key = columns
    with open(path, newline="", encoding="utf-8") as source:
        reader = csv.DictReader(source)
        if reader.fieldnames is None or not {theta_key, re_key, im_key} <= set(reader.fieldnames):
            raise BoundaryFormatError(f"{path}: header must contain {','.join(columns)}")
        try:
            rows = [
                (float(row[theta_key]), complex(float(row[re_key]), float(row[im_key])))
                for row in reader
            ]
        except (TypeError, ValueError) as exc:
            raise BoundaryFormatError(f"{path}: unreadable row ({exc})") from exc

    count = len(rows)
    if not _is_power_of_two(count):
        raise BoundaryFormatError(f"{path}: sample count {count} is not a power of two")

    theta = np.array([row[0] for row in rows])
    if not np.all(np.isfinite(theta)):
        raise BoundaryFormatError(f"{path}: non-finite angle")
    offset = np.abs(theta - uniform_angles(count))
    if np.any(offset > GRID_TOLERANCE):
        bad = int(np.argmax(offset))
        raise BoundaryFormatError(f"{path}: row {bad} is off the uniform grid (theta={theta[bad]})")

    return BoundaryFunction(np.array([row[1] for row in rows]), name=path)


def load_points(path: str) -> SampledSet:
    """Load a point cloud from a CSV with columns `re,im` or `re_z,im_z,re_w,im_w`."""
    with open(path, newline="", encoding="utf-8") as source:
        reader = csv.DictReader(source)
        fields = set(reader.fieldnames or ())
        if {"re_z", "im_z", "re_w", "im_w"} <= fields:
            keys = [("re_z", "im_z"), ("re_w", "im_w")]
        elif {"re", "im"} <= fields:
            keys = [("re", "im")]
        else:
            raise BoundaryFormatError(f"{path}: header must contain re,im or re_z,im_z,re_w,im_w")
        try:
            points = [
                [complex(float(row[re]), float(row[im])) for re, im in keys] for row in reader
            ]
        except (TypeError, ValueError) as exc:
            raise BoundaryFormatError(f"{path}: unreadable row ({exc})") from exc

    if not points:
        raise BoundaryFormatError(f"{path}: no points")
    return SampledSet(np.array(points), label=path)


def boundary_from_function(fn: Callable[[np.ndarray], np.ndarray], count: int, name="custom"):
    """Sample a callable of z = e^{iθ} on the uniform grid."""
    points = np.exp(1j * uniform_angles(count))
    return BoundaryFunction(np.asarray(fn(points), dtype=complex), name=name)


def builtin_phi(name: str, count: int, m: int | None = None) -> BoundaryFunction:
    """Sample one of the builtin corpus functions."""
    theta = uniform_angles(count)
    if name == "inverse":
        samples = np.exp(-1j * theta)
    elif name == "pole_m":
        if m is None or m <= 0:
            raise ValueError(f"pole_m needs a positive order, got {m}")
        samples = np.exp(-1j * m * theta)
        name = f"pole_{m}"
    elif name == "cos":
        samples = np.cos(theta)
    elif name == "exp_cos":
        samples = np.exp(np.cos(theta))
    elif name == "abs_sin":
        samples = np.abs(np.sin(theta))
    elif name == "zero":
        samples = np.zeros(count)
    else:
        raise ValueError(f"Unknown builtin function: {name}")
    return BoundaryFunction(samples, name=name)


def builtin_extension(name: str) -> Callable[[complex], complex] | None:
    """Closed-form interior values of a builtin, or None when none exists."""
    if name == "zero":
        return lambda z: 0j
    if name == "inverse":
        return lambda z: 1 / z
    if name.startswith("pole_"):
        order = int(name.split("_", 1)[1])
        return lambda z: z ** (-order)
    if name == "cos":
        return lambda z: (z * z + 1) / (2 * z)
    if name == "exp_cos":
        return lambda z: np.exp((z + 1 / z) / 2)
    return None


def resolve_phi(source: str, count: int) -> BoundaryFunction:
    """Resolve `builtin:<name>` (including `builtin:pole_<m>`) or a CSV path."""
    if not source.startswith("builtin:"):
        return load_boundary(source)

    name = source.split(":", 1)[1]
    if name.startswith("pole_") and name != "pole_m":
        try:
            order = int(name.split("_", 1)[1])
        except ValueError as exc:
            raise ValueError(f"Bad pole order in {source}") from exc
        return builtin_phi("pole_m", count, m=order)
    return builtin_phi(name, count)


def mobius(a: complex, z):
    """Disk automorphism M_a(z) = (z + a)/(1 + conj(a) z)."""
    return (z + a) / (1 + np.conj(a) * z)


def mobius_pullback(phi: BoundaryFunction, a: complex) -> BoundaryFunction:
    """Samples of φ∘M_a on the uniform grid via the trigonometric interpolant of φ."""
    if abs(a) >= 1:
        raise ValueError(f"Möbius parameter must lie in the open disk, got {a}")
    moved = mobius(a, phi.points)
    return BoundaryFunction(phi.evaluate(np.angle(moved)), name=f"{phi.name}∘M")
