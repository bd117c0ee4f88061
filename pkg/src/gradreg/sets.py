"""Closed convex constraint sets with exact Euclidean projections.

Three set kinds are supported: Euclidean balls, axis-aligned boxes and the
scaled probability simplex.  Each set knows its own diameter, which the
solvers and parameter recipes consume directly instead of recomputing it.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DimensionMismatchError

# numeric codes consumed by the compiled kernels
BALL, BOX, SIMPLEX = 0, 1, 2


def as_point(x, dim: int | None = None) -> np.ndarray:
    """Validate and return ``x`` as a finite 1-D float64 array."""
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DimensionMismatchError(f"expected a 1-D point, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError("point has non-finite coordinates")
    return arr


def project_simplex(v: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """Euclidean projection of ``v`` onto ``{w : w >= 0, sum(w) = scale}``.

    Sort-based exact algorithm, O(d log d).  The threshold index is the
    largest one whose sorted entry stays above the running average, which
    breaks ties deterministically.
    """
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    idx = np.arange(1, v.shape[0] + 1)
    rho = np.nonzero(u * idx > css - scale)[0][-1]
    theta = (css[rho] - scale) / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


class ConstraintSet(abc.ABC):
    """A closed convex set with an exact nearest-point map."""

    dim: int
    diameter: float

    @abc.abstractmethod
    def project(self, x) -> np.ndarray:
        """Return the point of the set closest to ``x``."""

    @abc.abstractmethod
    def contains(self, x, tol: float = 1e-9) -> bool:
        """Whether ``x`` lies in the set up to tolerance ``tol``."""

    @abc.abstractmethod
    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Draw a random point of the set (used by verification suites)."""

    @abc.abstractmethod
    def kernel_spec(self) -> tuple[int, np.ndarray, np.ndarray]:
        """(kind code, first param array, second param array) for kernels."""

    @abc.abstractmethod
    def to_dict(self) -> dict:
        """Serializable description."""


@dataclass(frozen=True)
class Ball(ConstraintSet):
    """Euclidean ball ``{x : ||x - center|| <= radius}``."""

    center: np.ndarray
    radius: float
    dim: int = field(init=False)
    diameter: float = field(init=False)

    def __post_init__(self):
        c = as_point(self.center)
        if not self.radius > 0:
            raise ConfigurationError("ball radius must be positive")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "dim", c.shape[0])
        object.__setattr__(self, "diameter", 2.0 * float(self.radius))

    def project(self, x):
        p = as_point(x, self.dim)
        delta = p - self.center
        norm = float(np.linalg.norm(delta))
        if norm <= self.radius:
            return p
        return self.center + delta * (self.radius / norm)

    def contains(self, x, tol=1e-9):
        p = as_point(x, self.dim)
        return float(np.linalg.norm(p - self.center)) <= self.radius + tol

    def sample(self, rng):
        z = rng.standard_normal(self.dim)
        norm = float(np.linalg.norm(z))
        if norm == 0.0:
            return self.center.copy()
        r = self.radius * rng.random() ** (1.0 / self.dim)
        return self.center + z * (r / norm)

    def kernel_spec(self):
        return BALL, self.center, np.array([self.radius])

    def to_dict(self):
        return {"kind": "ball", "center": self.center.tolist(), "radius": float(self.radius)}


@dataclass(frozen=True)
class Box(ConstraintSet):
    """Axis-aligned box ``{x : lower <= x <= upper}`` (componentwise)."""

    lower: np.ndarray
    upper: np.ndarray
    dim: int = field(init=False)
    diameter: float = field(init=False)

    def __post_init__(self):
        lo = as_point(self.lower)
        hi = as_point(self.upper, lo.shape[0])
        if np.any(lo > hi):
            raise ConfigurationError("box lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(self, "dim", lo.shape[0])
        object.__setattr__(self, "diameter", float(np.linalg.norm(hi - lo)))

    def project(self, x):
        p = as_point(x, self.dim)
        return np.clip(p, self.lower, self.upper)

    def contains(self, x, tol=1e-9):
        p = as_point(x, self.dim)
        return bool(np.all(p >= self.lower - tol) and np.all(p <= self.upper + tol))

    def sample(self, rng):
        return self.lower + rng.random(self.dim) * (self.upper - self.lower)

    def kernel_spec(self):
        return BOX, self.lower, self.upper

    def to_dict(self):
        return {"kind": "box", "lower": self.lower.tolist(), "upper": self.upper.tolist()}


@dataclass(frozen=True)
class Simplex(ConstraintSet):
    """Scaled probability simplex ``{x : x >= 0, sum(x) = scale}``."""

    dim: int
    scale: float = 1.0
    diameter: float = field(init=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ConfigurationError("simplex dimension must be >= 1")
        if not self.scale > 0:
            raise ConfigurationError("simplex scale must be positive")
        object.__setattr__(self, "diameter", float(self.scale) * np.sqrt(2.0))

    def project(self, x):
        p = as_point(x, self.dim)
        return project_simplex(p, self.scale)

    def contains(self, x, tol=1e-9):
        p = as_point(x, self.dim)
        return bool(np.all(p >= -tol) and abs(float(p.sum()) - self.scale) <= tol)

    def sample(self, rng):
        # normalized exponentials are uniform on the simplex
        e = -np.log(rng.random(self.dim))
        return self.scale * e / e.sum()

    def kernel_spec(self):
        return SIMPLEX, np.zeros(self.dim), np.array([self.scale])

    def to_dict(self):
        return {"kind": "simplex", "dim": self.dim, "scale": float(self.scale)}


_SET_KEYS = {
    "ball": {"center", "radius"},
    "box": {"lower", "upper"},
    "simplex": {"dim", "scale"},
}


def set_from_dict(spec: dict) -> ConstraintSet:
    """Rebuild a constraint set from its ``to_dict`` form."""
    kind = spec.get("kind")
    if kind not in _SET_KEYS:
        raise ConfigurationError(f"unknown constraint set kind {kind!r}")
    extra = set(spec) - _SET_KEYS[kind] - {"kind"}
    if extra:
        raise ConfigurationError(f"unknown keys in constraint set spec: {sorted(extra)}")
    try:
        if kind == "ball":
            return Ball(np.asarray(spec["center"], dtype=float), float(spec["radius"]))
        if kind == "box":
            return Box(np.asarray(spec["lower"], dtype=float), np.asarray(spec["upper"], dtype=float))
        return Simplex(int(spec["dim"]), float(spec.get("scale", 1.0)))
    except KeyError as exc:
        raise ConfigurationError(f"constraint set spec missing key {exc}") from exc
