"""Problem instances: objective, oracle, constraint set and certified constants.

The deterministic ``value`` function exists for verification only; solvers
see nothing but the stochastic oracle and the projection.  Instances of the
shipped families additionally carry structural descriptors (a max-affine
conjugate form, and a separable piecewise-linear form when applicable) that
the proximal machinery uses for certified inner solves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigurationError, DimensionMismatchError
from .oracles import SubgradientOracle
from .sets import ConstraintSet, as_point


@dataclass(frozen=True)
class MaxAffineForm:
    """Conjugate description ``g(y) = max_{u in U} <u, A y + b>``.

    ``dual="simplex"`` gives a pointwise max of affine pieces; ``dual="box"``
    (with ``U = [-1, 1]^m``) gives a sum of absolute values of affine forms.
    Rows of ``matrix`` must already carry any averaging weights.
    """

    matrix: np.ndarray
    offsets: np.ndarray
    dual: str

    def __post_init__(self):
        a = np.ascontiguousarray(self.matrix, dtype=np.float64)
        b = np.ascontiguousarray(self.offsets, dtype=np.float64)
        if a.ndim != 2 or b.ndim != 1 or a.shape[0] != b.shape[0]:
            raise ConfigurationError("max-affine form needs matrix (m,d) and offsets (m,)")
        if self.dual not in ("simplex", "box"):
            raise ConfigurationError(f"unknown dual geometry {self.dual!r}")
        object.__setattr__(self, "matrix", a)
        object.__setattr__(self, "offsets", b)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def value(self, y) -> float:
        scores = self.matrix @ as_point(y, self.dim) + self.offsets
        if self.dual == "simplex":
            return float(scores.max())
        return float(np.abs(scores).sum())

    def subgradient(self, y) -> np.ndarray:
        """A deterministic subgradient (lowest-index attaining piece)."""
        scores = self.matrix @ as_point(y, self.dim) + self.offsets
        if self.dual == "simplex":
            return self.matrix[int(np.argmax(scores))].copy()
        return self.matrix.T @ np.sign(scores)


@dataclass(frozen=True)
class SeparablePiecewiseLinear:
    """Coordinatewise objective ``sum_c sum_k gains[c][k] * |y_c - roots[c][k]|``.

    Enables an exact per-coordinate proximal solve.  ``gains`` entries must
    be positive.
    """

    gains: tuple[np.ndarray, ...]
    roots: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.gains) != len(self.roots):
            raise ConfigurationError("separable form needs matching gains/roots per coordinate")
        gains = tuple(np.asarray(g, dtype=np.float64) for g in self.gains)
        roots = tuple(np.asarray(r, dtype=np.float64) for r in self.roots)
        for g, r in zip(gains, roots):
            if g.shape != r.shape:
                raise ConfigurationError("gains and roots must align per coordinate")
            if np.any(g <= 0):
                raise ConfigurationError("separable gains must be positive")
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "roots", roots)

    @property
    def dim(self) -> int:
        return len(self.gains)

    def value(self, y) -> float:
        p = as_point(y, self.dim)
        return float(sum(np.dot(g, np.abs(p[c] - r)) for c, (g, r) in enumerate(zip(self.gains, self.roots))))


@dataclass(frozen=True)
class ProblemInstance:
    """A Lipschitz convex objective over a constraint set.

    ``lipschitz`` is the oracle's certified second-moment constant (which
    also bounds the value function's Lipschitz modulus on the set).
    ``quad_terms`` holds fixed quadratic add-ons ``(a, z)`` meaning
    ``(a/2) ||x - z||^2``; the base structure descriptors never include them.
    """

    value_fn: Callable[[np.ndarray], float]
    oracle: SubgradientOracle
    set: ConstraintSet
    lipschitz: float
    diameter: float
    known_min: tuple[np.ndarray, float] | None = None
    structure: MaxAffineForm | None = None
    separable: SeparablePiecewiseLinear | None = None
    quad_terms: tuple[tuple[float, np.ndarray], ...] = ()
    spec: dict | None = None
    name: str = "problem"

    def __post_init__(self):
        if not self.diameter > 0:
            raise ConfigurationError("problem diameter must be positive")
        if self.lipschitz < 0:
            raise ConfigurationError("lipschitz constant must be nonnegative")
        terms = tuple((float(a), as_point(z, self.dim)) for a, z in self.quad_terms)
        for a, _ in terms:
            if a <= 0:
                raise ConfigurationError("quadratic term weights must be positive")
        object.__setattr__(self, "quad_terms", terms)
        if self.known_min is not None:
            x_star, v_star = self.known_min
            object.__setattr__(self, "known_min", (as_point(x_star, self.dim), float(v_star)))

    @property
    def dim(self) -> int:
        return self.set.dim

    def value(self, x) -> float:
        """Deterministic objective value (verification only, never solvers)."""
        p = as_point(x, self.dim)
        v = float(self.value_fn(p))
        for a, z in self.quad_terms:
            d = p - z
            v += 0.5 * a * float(d @ d)
        return v

    def check_point(self, x) -> np.ndarray:
        p = as_point(x, None)
        if p.shape[0] != self.dim:
            raise DimensionMismatchError(f"point has dimension {p.shape[0]}, problem has {self.dim}")
        return p
