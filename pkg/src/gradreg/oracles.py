"""Stochastic subgradient oracles and reproducible random streams.

An oracle samples random vectors whose mean is a subgradient of the
objective at the queried point and whose second moment is bounded.  Oracles
compose with quadratic shift terms ``weight * (x - center)``: the outer
regularization loop builds its sequence of perturbed objectives by stacking
such shifts onto a fixed base sampler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigurationError, PreconditionError
from .sets import as_point


def seeded_stream(seed: int) -> np.random.Generator:
    """Deterministic random stream; equal seeds give bit-identical runs."""
    return np.random.default_rng(seed)


def replicate_stream(base_seed: int, replicate: int) -> np.random.Generator:
    """Independent stream for one replicate, hashed from (seed, index)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=base_seed, spawn_key=(replicate,)))


def child_stream(base_seed: int, *key: int) -> np.random.Generator:
    """Independent stream for an arbitrary integer key path."""
    return np.random.default_rng(np.random.SeedSequence(entropy=base_seed, spawn_key=tuple(key)))


@dataclass(frozen=True)
class QuadraticShift:
    """Additive oracle term ``weight * (x - center)``."""

    weight: float
    center: np.ndarray

    def __post_init__(self):
        if not self.weight > 0:
            raise PreconditionError("shift weight must be positive")
        object.__setattr__(self, "center", as_point(self.center))


class SubgradientOracle:
    """Sampler of stochastic subgradients with a certified second moment.

    Parameters
    ----------
    sampler : callable ``(x, rng) -> ndarray``
        Draws one stochastic subgradient of the base objective at ``x``,
        consuming the stream in a fixed per-call order.
    lipschitz : float
        Bound ``L`` with ``E||sample||^2 <= L^2`` over the feasible set for
        the base sampler (the unshifted oracle).
    diameter : float
        Diameter of the feasible set; enters the second-moment bound of
        shifted oracles.
    kernel_data : tuple or None
        Optional family descriptor consumed by the compiled solver loops,
        e.g. ``("l1_rows", A, b)`` or ``("plmax", A, b, sigma)``.
    """

    def __init__(
        self,
        sampler: Callable[[np.ndarray, np.random.Generator], np.ndarray],
        lipschitz: float,
        diameter: float,
        shifts: tuple[QuadraticShift, ...] = (),
        kernel_data: tuple | None = None,
    ):
        if lipschitz < 0:
            raise ConfigurationError("lipschitz bound must be nonnegative")
        if not diameter > 0:
            raise ConfigurationError("diameter must be positive")
        self._sampler = sampler
        self.lipschitz = float(lipschitz)
        self.diameter = float(diameter)
        self.shifts = tuple(shifts)
        self.kernel_data = kernel_data

    @property
    def total_shift_weight(self) -> float:
        return math.fsum(s.weight for s in self.shifts)

    def shift_aggregate(self) -> tuple[float, np.ndarray | None]:
        """Collapse all shift terms to ``(M, sum_j w_j c_j)``."""
        if not self.shifts:
            return 0.0, None
        weight = self.total_shift_weight
        vec = np.zeros_like(self.shifts[0].center)
        for s in self.shifts:
            vec = vec + s.weight * s.center
        return weight, vec

    @property
    def second_moment_bound(self) -> float:
        """Certified ``L`` with ``E||sample||^2 <= L^2`` for this oracle.

        Shift terms of total weight ``M`` inflate the base bound to
        ``sqrt(2 (L^2 + D^2 M^2))``.
        """
        if not self.shifts:
            return self.lipschitz
        m = self.total_shift_weight
        return math.sqrt(2.0 * (self.lipschitz**2 + (self.diameter * m) ** 2))

    def sample(self, x, rng: np.random.Generator) -> np.ndarray:
        p = as_point(x)
        g = np.asarray(self._sampler(p, rng), dtype=np.float64)
        if self.shifts:
            # aggregated form sum_j w_j (x - c_j) = M x - sum_j w_j c_j,
            # evaluated exactly as the compiled solver loops evaluate it
            weight, vec = self.shift_aggregate()
            g = g + (weight * p - vec)
        return g

    def shifted(self, weight: float, center) -> "SubgradientOracle":
        """New oracle sampling ``self(x) + weight * (x - center)``."""
        shift = QuadraticShift(float(weight), as_point(center))
        return SubgradientOracle(
            self._sampler,
            self.lipschitz,
            self.diameter,
            self.shifts + (shift,),
            kernel_data=self.kernel_data,
        )


def shift_oracle(base: SubgradientOracle, weight: float, center) -> SubgradientOracle:
    """Attach the quadratic term ``weight * (x - center)`` to ``base``."""
    return base.shifted(weight, center)
