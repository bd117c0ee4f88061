"""Subdifferential models and min-norm distance estimation.

For the shipped structured objectives the subdifferential at a point is a
convex hull (max of affine pieces) or an interval-weighted span (sums of
absolute values) around a fixed vector.  Adding the normal cone of the
constraint set gives a model of the subdifferential of the constrained
objective, whose min-norm point is found by a small projected-gradient QP.
"""

from __future__ import annotations

import numpy as np

from .errors import UnsupportedInstanceError
from .problem import ProblemInstance
from .sets import Ball, Box, ConstraintSet, project_simplex

ACTIVATION_TOL = 1e-8


def subdifferential_model(problem: ProblemInstance, y, act_tol: float = ACTIVATION_TOL):
    """Model of the objective's subdifferential at ``y``.

    Returns ``(fixed, generators, geometry)`` describing the set
    ``{fixed + generators.T @ w : w in W}`` with ``W`` the unit simplex
    (``geometry == "simplex"``) or the cube ``[-1, 1]^q`` (``"box"``).
    Pieces are classified active within ``act_tol``.
    """
    form = problem.structure
    if form is None:
        raise UnsupportedInstanceError(f"{problem.name}: no structural subdifferential model")
    p = problem.check_point(y)
    fixed = np.zeros(problem.dim)
    for a, z in problem.quad_terms:
        fixed += a * (p - z)
    scores = form.matrix @ p + form.offsets
    if form.dual == "simplex":
        active = scores >= scores.max() - act_tol
        return fixed, form.matrix[active], "simplex"
    tied = np.abs(scores) <= act_tol
    fixed = fixed + form.matrix[~tied].T @ np.sign(scores[~tied])
    return fixed, form.matrix[tied], "box"


def normal_cone_rays(set_: ConstraintSet, y, face_tol: float = 1e-9) -> np.ndarray:
    """Generating rays of the normal cone of ``set_`` at ``y`` (ball/box only)."""
    if isinstance(set_, Ball):
        delta = np.asarray(y, dtype=float) - set_.center
        norm = float(np.linalg.norm(delta))
        if norm >= set_.radius * (1.0 - face_tol) and norm > 0:
            return (delta / norm)[None, :]
        return np.zeros((0, set_.dim))
    if isinstance(set_, Box):
        p = np.asarray(y, dtype=float)
        rays = []
        span = np.maximum(set_.upper - set_.lower, 1.0)
        for i in range(set_.dim):
            if p[i] >= set_.upper[i] - face_tol * span[i]:
                e = np.zeros(set_.dim)
                e[i] = 1.0
                rays.append(e)
            if p[i] <= set_.lower[i] + face_tol * span[i]:
                e = np.zeros(set_.dim)
                e[i] = -1.0
                rays.append(e)
        if rays:
            return np.stack(rays)
        return np.zeros((0, set_.dim))
    raise UnsupportedInstanceError(f"normal cone not implemented for {type(set_).__name__}")


def _min_norm_qp(fixed, gens, geometry, rays, tol=1e-9, max_iter=50000):
    """min ||fixed + gens.T w + rays.T t|| over the weight geometry and t >= 0."""
    q, r = gens.shape[0], rays.shape[0]
    if q == 0 and r == 0:
        return float(np.linalg.norm(fixed)), fixed.copy()
    stack = np.vstack([gens, rays]) if r else gens
    if q == 0:
        stack = rays
    gram_lip = 2.0 * np.linalg.norm(stack, 2) ** 2
    if gram_lip == 0.0:
        w = np.full(q, 1.0 / q) if (q and geometry == "simplex") else np.zeros(q)
        vec = fixed + (gens.T @ w if q else 0.0)
        return float(np.linalg.norm(vec)), vec

    def project(v):
        w, t = v[:q], v[q:]
        if q:
            if geometry == "simplex":
                w = project_simplex(w, 1.0)
            else:
                w = np.clip(w, -1.0, 1.0)
        return np.concatenate([w, np.maximum(t, 0.0)])

    v = project(np.zeros(q + r))
    z = v.copy()
    t_acc = 1.0
    step = 1.0 / gram_lip
    best_val = np.inf
    best_vec = fixed.copy()
    last_check = np.inf
    for it in range(max_iter):
        resid = fixed + stack.T @ z
        grad = 2.0 * (stack @ resid)
        v_new = project(z - step * grad)
        if np.dot(grad, v_new - v) > 0:
            t_new = 1.0
            z = v_new.copy()
        else:
            t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_acc * t_acc))
            z = v_new + (t_acc - 1.0) / t_new * (v_new - v)
        v, t_acc = v_new, t_new
        if it % 25 == 0:
            vec = fixed + stack.T @ v
            val = float(vec @ vec)
            if val < best_val:
                best_val, best_vec = val, vec
            if last_check - val <= tol * tol:
                break
            last_check = val
    vec = fixed + stack.T @ v
    val = float(vec @ vec)
    if val < best_val:
        best_val, best_vec = val, vec
    return float(np.sqrt(best_val)), best_vec


def min_norm_subgradient(
    problem: ProblemInstance,
    y,
    act_tol: float = ACTIVATION_TOL,
    include_normal_cone: bool = True,
    extra_fixed: np.ndarray | None = None,
    tol: float = 1e-9,
) -> float:
    """Estimated distance from zero to the (constrained) subdifferential at ``y``.

    The estimate is an upper bound on the distance for the modelled
    subdifferential; ``extra_fixed`` adds a known smooth gradient term (used
    by the proximal certificate).
    """
    fixed, gens, geometry = subdifferential_model(problem, y, act_tol)
    if extra_fixed is not None:
        fixed = fixed + extra_fixed
    rays = (
        normal_cone_rays(problem.set, y)
        if include_normal_cone
        else np.zeros((0, problem.dim))
    )
    dist, _ = _min_norm_qp(fixed, gens, geometry, rays, tol=tol)
    return dist
