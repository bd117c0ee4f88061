"""Seeded, verifiable problem generators with certified constants.

Two base families are shipped: pointwise maxima of affine pieces (with
bounded zero-mean oracle noise) and one-row-at-a-time least-absolute-error
regression.  A strongly convex wrapper adds an explicit quadratic.  All
generators are pure functions of their seed and parameters, so regeneration
is bit-identical and instances can be serialized as their recipe.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .errors import ConfigurationError, UnsupportedInstanceError
from .oracles import SubgradientOracle
from .problem import MaxAffineForm, ProblemInstance, SeparablePiecewiseLinear
from .sets import Ball, Box, ConstraintSet, Simplex, set_from_dict


def _sample_plmax(mat, off, sigma, x, rng):
    # one shared draw recipe: delegate to the compiled sampler so the
    # fallback and compiled solver paths stay bit-identical
    out = np.empty(mat.shape[1])
    kernels._sample_base(kernels.FAM_PLMAX, mat, off, sigma,
                         np.ascontiguousarray(x, dtype=np.float64), rng, out)
    return out


def _sample_l1(mat, neg_b, x, rng):
    out = np.empty(mat.shape[1])
    kernels._sample_base(kernels.FAM_L1, mat, neg_b, 0.0,
                         np.ascontiguousarray(x, dtype=np.float64), rng, out)
    return out


def piecewise_linear_max_instance(
    slopes,
    offsets,
    noise_scale: float,
    set_: ConstraintSet,
    known_min=None,
    spec=None,
    name="plmax",
) -> ProblemInstance:
    """Pointwise max of affine pieces with uniform-in-ball oracle noise.

    The oracle returns the slope of the lowest-index attaining piece plus a
    zero-mean noise vector drawn uniformly from a ball of radius
    ``noise_scale``; both the mean and the second moment are certified by
    construction.
    """
    mat = np.ascontiguousarray(slopes, dtype=np.float64)
    off = np.ascontiguousarray(offsets, dtype=np.float64)
    if noise_scale < 0:
        raise ConfigurationError("noise scale must be nonnegative")
    d = set_.dim
    if mat.ndim != 2 or mat.shape[1] != d:
        raise ConfigurationError("slopes must be (pieces, dim) matching the set")
    form = MaxAffineForm(mat, off, "simplex")
    sigma = float(noise_scale)
    # uniform-in-ball noise has E||xi||^2 = sigma^2 d / (d+2)
    lipschitz = float(np.max(np.linalg.norm(mat, axis=1))) + sigma * math.sqrt(d / (d + 2.0))
    oracle = SubgradientOracle(
        sampler=lambda x, rng: _sample_plmax(mat, off, sigma, x, rng),
        lipschitz=lipschitz,
        diameter=set_.diameter,
        kernel_data=("plmax", mat, off, sigma),
    )
    return ProblemInstance(
        value_fn=form.value,
        oracle=oracle,
        set=set_,
        lipschitz=lipschitz,
        diameter=set_.diameter,
        known_min=known_min,
        structure=form,
        spec=spec,
        name=name,
    )


def l1_regression_instance(
    rows_a,
    rows_b,
    set_: ConstraintSet,
    known_min=None,
    spec=None,
    name="l1",
) -> ProblemInstance:
    """Mean absolute error over fixed rows, sampled one row at a time.

    The oracle draws a row uniformly and returns ``sign(residual) * row``;
    uniform sampling supplies the ``1/n`` averaging weight, so the mean draw
    is an exact subgradient.
    """
    mat = np.ascontiguousarray(rows_a, dtype=np.float64)
    b = np.ascontiguousarray(rows_b, dtype=np.float64)
    d = set_.dim
    if mat.ndim != 2 or mat.shape[1] != d or b.shape != (mat.shape[0],):
        raise ConfigurationError("rows must be (n, dim) with matching targets")
    n = mat.shape[0]
    form = MaxAffineForm(mat / n, -b / n, "box")
    neg_b = -b
    lipschitz = float(np.max(np.linalg.norm(mat, axis=1)))
    oracle = SubgradientOracle(
        sampler=lambda x, rng: _sample_l1(mat, neg_b, x, rng),
        lipschitz=lipschitz,
        diameter=set_.diameter,
        kernel_data=("l1_rows", mat, neg_b),
    )
    separable = None
    nz_per_row = np.count_nonzero(mat, axis=1)
    if np.all(nz_per_row <= 1) and isinstance(set_, Box):
        gains = [[] for _ in range(d)]
        roots = [[] for _ in range(d)]
        for k in range(n):
            nz = np.nonzero(mat[k])[0]
            if nz.shape[0] == 0:
                continue  # constant |b_k| term, does not move the argmin
            c = int(nz[0])
            gains[c].append(abs(mat[k, c]) / n)
            roots[c].append(b[k] / mat[k, c])
        separable = SeparablePiecewiseLinear(
            gains=tuple(np.asarray(g) for g in gains),
            roots=tuple(np.asarray(r) for r in roots),
        )
    return ProblemInstance(
        value_fn=form.value,
        oracle=oracle,
        set=set_,
        lipschitz=lipschitz,
        diameter=set_.diameter,
        known_min=known_min,
        structure=form,
        separable=separable,
        spec=spec,
        name=name,
    )


def strongly_convex_wrap(base: ProblemInstance, mu_sc: float, center) -> ProblemInstance:
    """Add an explicit quadratic ``mu_sc/2 ||x - center||^2`` to ``base``."""
    if not mu_sc > 0:
        raise ConfigurationError("wrap curvature must be positive")
    c = base.check_point(center)
    oracle = base.oracle.shifted(mu_sc, c)
    known = None
    if base.known_min is not None and np.allclose(base.known_min[0], c, atol=1e-14):
        known = base.known_min
    return ProblemInstance(
        value_fn=base.value_fn,
        oracle=oracle,
        set=base.set,
        lipschitz=oracle.second_moment_bound,
        diameter=base.diameter,
        known_min=known,
        structure=base.structure,
        separable=base.separable,
        quad_terms=base.quad_terms + ((float(mu_sc), c),),
        spec=base.spec,
        name=base.name + "+quad",
    )


def exact_mean_subgradient(problem: ProblemInstance, x) -> np.ndarray:
    """Closed-form mean of the oracle at ``x`` (finite-sum and max families)."""
    kd = problem.oracle.kernel_data
    p = problem.check_point(x)
    if kd is None:
        raise UnsupportedInstanceError("no closed-form oracle mean for this instance")
    if kd[0] == "l1_rows":
        mat, neg_b = kd[1], kd[2]
        signs = np.sign(mat @ p + neg_b)
        mean = mat.T @ signs / mat.shape[0]
    else:
        mat, off = kd[1], kd[2]
        mean = mat[int(np.argmax(mat @ p + off))].copy()
    weight, vec = problem.oracle.shift_aggregate()
    if vec is not None:
        mean = mean + weight * p - vec
    return mean


def _default_set(dimension: int, spec: dict | None) -> ConstraintSet:
    if spec is None:
        return Box(np.full(dimension, -1.0), np.full(dimension, 1.0))
    return set_from_dict(spec)


def _interior_point(set_: ConstraintSet, rng: np.random.Generator) -> np.ndarray:
    if isinstance(set_, Ball):
        z = rng.standard_normal(set_.dim)
        z /= max(np.linalg.norm(z), 1e-12)
        return set_.center + 0.3 * set_.radius * rng.random() * z
    if isinstance(set_, Box):
        mid = 0.5 * (set_.lower + set_.upper)
        half = 0.5 * (set_.upper - set_.lower)
        return mid + 0.4 * half * (2.0 * rng.random(set_.dim) - 1.0)
    e = -np.log(rng.random(set_.dim))
    w = e / e.sum()
    uniform = np.full(set_.dim, 1.0 / set_.dim)
    return set_.scale * (0.5 * w + 0.5 * uniform)


_GEN_KEYS = {
    "piecewise_linear_max": {"pieces", "noise", "set", "designed", "scale"},
    "l1_regression": {"rows", "set", "axis_aligned", "designed", "scale"},
    "strongly_convex": {"base", "mu", "center"},
}


def generate(kind: str, dimension: int, seed: int, params: dict | None = None) -> ProblemInstance:
    """Build a problem instance from its recipe; bit-identical per seed."""
    params = dict(params or {})
    if kind not in _GEN_KEYS:
        raise ConfigurationError(f"unknown problem kind {kind!r}")
    extra = set(params) - _GEN_KEYS[kind]
    if extra:
        raise ConfigurationError(f"unknown problem params for {kind}: {sorted(extra)}")
    if dimension < 1:
        raise ConfigurationError("dimension must be >= 1")
    recipe = {"kind": kind, "dimension": int(dimension), "seed": int(seed), "params": params}
    rng = np.random.default_rng(np.random.SeedSequence(entropy=int(seed)))
    name = f"{kind}-d{dimension}-s{seed}"

    if kind == "strongly_convex":
        base_spec = params.get("base")
        if not isinstance(base_spec, dict):
            raise ConfigurationError("strongly_convex needs a nested 'base' problem spec")
        base = generate(
            base_spec.get("kind"),
            int(base_spec.get("dimension", dimension)),
            int(base_spec.get("seed", seed)),
            base_spec.get("params"),
        )
        mu = float(params.get("mu", 1.0))
        center_spec = params.get("center", "minimizer")
        if center_spec == "minimizer":
            if base.known_min is None:
                raise ConfigurationError("base instance has no known minimizer to center on")
            center = base.known_min[0]
        elif isinstance(center_spec, (list, tuple)):
            center = np.asarray(center_spec, dtype=float)
        else:
            raise ConfigurationError(f"unknown wrap center {center_spec!r}")
        wrapped = strongly_convex_wrap(base, mu, center)
        return _with_recipe(wrapped, recipe, name + "+quad")

    set_ = _default_set(dimension, params.get("set"))
    if set_.dim != dimension:
        raise ConfigurationError("constraint set dimension does not match the instance")
    scale = float(params.get("scale", 1.0))
    designed = bool(params.get("designed", False))

    if kind == "piecewise_linear_max":
        pieces = int(params.get("pieces", 2 * dimension))
        if pieces < 1:
            raise ConfigurationError("pieces must be >= 1")
        sigma = float(params.get("noise", 0.0))
        if designed:
            if pieces < 2:
                raise ConfigurationError("designed instances need at least 2 pieces")
            x_star = _interior_point(set_, rng)
            weights = 0.5 + rng.random(pieces)
            weights /= weights.sum()
            mat = rng.standard_normal((pieces, dimension)) * scale
            mat[-1] = -(weights[:-1] @ mat[:-1]) / weights[-1]
            off = -mat @ x_star
            known = (x_star, 0.0)
        else:
            mat = rng.standard_normal((pieces, dimension)) * scale
            off = rng.standard_normal(pieces) * scale
            known = None
        inst = piecewise_linear_max_instance(mat, off, sigma, set_, known_min=known, name=name)
        return _with_recipe(inst, recipe, name)

    rows = int(params.get("rows", 2 * dimension))
    if rows < 1:
        raise ConfigurationError("rows must be >= 1")
    axis_aligned = bool(params.get("axis_aligned", False))
    if axis_aligned:
        mat = np.zeros((rows, dimension))
        cols = rng.integers(0, dimension, size=rows)
        mags = (0.2 + rng.random(rows)) * scale
        signs = np.where(rng.random(rows) < 0.5, -1.0, 1.0)
        for k in range(rows):
            mat[k, cols[k]] = mags[k] * signs[k]
    else:
        mat = rng.standard_normal((rows, dimension)) * scale
    if designed:
        x_star = _interior_point(set_, rng)
        b = mat @ x_star
        known = (x_star, 0.0)
    else:
        b = rng.standard_normal(rows) * scale
        known = None
    inst = l1_regression_instance(mat, b, set_, known_min=known, name=name)
    return _with_recipe(inst, recipe, name)


def _with_recipe(inst: ProblemInstance, recipe: dict, name: str) -> ProblemInstance:
    import dataclasses

    return dataclasses.replace(inst, spec=recipe, name=name)


def _value_1d(problem: ProblemInstance, t: float) -> float:
    return problem.value(np.array([t]))


def _interval_of(set_: ConstraintSet) -> tuple[float, float]:
    if isinstance(set_, Box):
        return float(set_.lower[0]), float(set_.upper[0])
    if isinstance(set_, Ball):
        return float(set_.center[0] - set_.radius), float(set_.center[0] + set_.radius)
    return float(set_.scale), float(set_.scale)


def _true_min_1d(problem: ProblemInstance) -> tuple[np.ndarray, float]:
    lo, hi = _interval_of(problem.set)
    form = problem.structure
    breakpoints = set()
    if form is not None:
        mat, off = form.matrix, form.offsets
        if form.dual == "box":
            for k in range(mat.shape[0]):
                if mat[k, 0] != 0.0:
                    breakpoints.add(-off[k] / mat[k, 0])
        else:
            m = mat.shape[0]
            for i in range(m):
                for j in range(i + 1, m):
                    da = mat[i, 0] - mat[j, 0]
                    if da != 0.0:
                        breakpoints.add((off[j] - off[i]) / da)
    quad_weight = sum(a for a, _ in problem.quad_terms)
    candidates = {lo, hi}
    candidates.update(t for t in breakpoints if lo <= t <= hi)
    if quad_weight > 0 and form is not None:
        # per-segment quadratic vertices, with the exact PL slope mid-segment
        quad_center = sum(a * z[0] for a, z in problem.quad_terms) / quad_weight
        points = sorted(b for b in breakpoints if lo < b < hi)
        edges = [lo] + points + [hi]
        for a, b_ in zip(edges, edges[1:]):
            mid = 0.5 * (a + b_)
            scores = form.matrix[:, 0] * mid + form.offsets
            if form.dual == "simplex":
                slope = float(form.matrix[int(np.argmax(scores)), 0])
            else:
                slope = float(form.matrix[:, 0] @ np.sign(scores))
            vertex = quad_center - slope / quad_weight
            if a <= vertex <= b_:
                candidates.add(vertex)
    best_t = min(candidates, key=lambda t: _value_1d(problem, t))
    return np.array([best_t]), _value_1d(problem, best_t)


def _true_min_2d(problem: ProblemInstance, grid: int = 48, rounds: int = 18):
    set_ = problem.set
    if isinstance(set_, Box):
        lo, hi = set_.lower.copy(), set_.upper.copy()
    elif isinstance(set_, Ball):
        lo = set_.center - set_.radius
        hi = set_.center + set_.radius
    else:
        raise UnsupportedInstanceError("grid minimization needs a ball or box set")
    best_p, best_v = None, np.inf
    for _ in range(rounds):
        xs = np.linspace(lo[0], hi[0], grid)
        ys = np.linspace(lo[1], hi[1], grid)
        for xv in xs:
            for yv in ys:
                p = set_.project(np.array([xv, yv]))
                v = problem.value(p)
                if v < best_v:
                    best_v, best_p = v, p
        span = (hi - lo) / (grid - 1)
        lo = np.maximum(best_p - 2.5 * span, lo)
        hi = np.minimum(best_p + 2.5 * span, hi)
    return best_p, best_v


def true_min(problem: ProblemInstance) -> tuple[np.ndarray, float]:
    """Constrained minimizer and value, for designed or low-dimensional instances."""
    if problem.known_min is not None:
        return problem.known_min
    if problem.dim == 1:
        return _true_min_1d(problem)
    if problem.dim == 2:
        return _true_min_2d(problem)
    raise UnsupportedInstanceError(
        f"{problem.name}: no designed minimizer and dimension {problem.dim} > 2"
    )


def instance_to_dict(problem: ProblemInstance) -> dict:
    """Serializable recipe plus derived constants (human-readable)."""
    if problem.spec is None:
        raise UnsupportedInstanceError("instance was not built from a recipe")
    out = {"schema": "gradreg-instance@1"}
    out.update(problem.spec)
    out["derived"] = {
        "lipschitz": float(problem.lipschitz),
        "diameter": float(problem.diameter),
        "set": problem.set.to_dict(),
    }
    if problem.known_min is not None:
        out["derived"]["minimizer"] = problem.known_min[0].tolist()
        out["derived"]["min_value"] = float(problem.known_min[1])
    return out


def instance_from_dict(data: dict) -> ProblemInstance:
    """Regenerate an instance from its serialized recipe (bit-identical)."""
    if data.get("schema") != "gradreg-instance@1":
        raise ConfigurationError(f"unknown instance schema {data.get('schema')!r}")
    allowed = {"schema", "kind", "dimension", "seed", "params", "derived"}
    extra = set(data) - allowed
    if extra:
        raise ConfigurationError(f"unknown keys in instance file: {sorted(extra)}")
    return generate(data["kind"], int(data["dimension"]), int(data["seed"]), data.get("params"))
