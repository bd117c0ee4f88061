"""Moreau envelope evaluation: proximal points, gradients and identities.

The envelope of an objective ``phi`` at smoothing parameter ``lam > 0`` is
``min_y phi(y) + ||y - x||^2 / (2 lam)``; its gradient is
``(x - prox(x)) / lam`` where ``prox`` is the inner minimizer.  Throughout
the package ``lam`` always denotes this smoothing parameter; call sites
working with the reciprocal modulus convert explicitly.

Inner solves are certified: each result carries a ``residual`` that provably
bounds the inner objective's optimality gap, obtained from the duality gap
of the structured dual ascent, the strong-convexity bound on a min-norm
subgradient estimate, or exactness of the separable coordinate solve.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, ProxToleranceError, UnsupportedInstanceError
from .kernels import dual_prox_loop
from .problem import MaxAffineForm, ProblemInstance
from .sets import Ball, Box, Simplex, as_point
from .stationarity import min_norm_subgradient, normal_cone_rays

DEFAULT_IDENTITY_TOL = 1e-8
DEFAULT_WITNESS_TOL = 1e-6


@dataclass(frozen=True)
class ProxResult:
    """Certified inner solve of the envelope at one point.

    ``gradient`` is defined as ``(x - prox_point) / lam``; ``residual``
    bounds the inner objective's gap at ``prox_point``.
    """

    prox_point: np.ndarray
    envelope_value: float
    gradient: np.ndarray
    residual: float


@dataclass(frozen=True)
class QuadraticPerturbation:
    """A sum of quadratic terms ``sum_i (a_i / 2) ||y - z_i||^2``."""

    terms: tuple[tuple[float, np.ndarray], ...]

    def __post_init__(self):
        terms = tuple((float(a), as_point(z)) for a, z in self.terms)
        if any(a <= 0 for a, _ in terms):
            raise PreconditionError("perturbation weights must be positive")
        dims = {z.shape[0] for _, z in terms}
        if len(dims) > 1:
            raise PreconditionError("perturbation centers must share a dimension")
        object.__setattr__(self, "terms", terms)

    @property
    def total_weight(self) -> float:
        return float(sum(a for a, _ in self.terms))

    @property
    def centroid(self) -> np.ndarray:
        if not self.terms:
            raise PreconditionError("empty perturbation has no centroid")
        acc = np.zeros_like(self.terms[0][1])
        for a, z in self.terms:
            acc = acc + a * z
        return acc / self.total_weight

    def evaluate(self, y) -> float:
        """Direct evaluation of the sum of quadratic terms."""
        p = as_point(y)
        total = 0.0
        for a, z in self.terms:
            d = p - z
            total += 0.5 * a * float(d @ d)
        return total


def complete_square(pert: QuadraticPerturbation, y) -> tuple[float, float]:
    """Rewrite the quadratic sum around its centroid.

    Returns ``(value_at_centroid, reconstructed)`` where the reconstruction
    ``Q(centroid) + (total_weight / 2) ||y - centroid||^2`` equals the direct
    evaluation of the sum at ``y``.
    """
    if not pert.terms:
        raise PreconditionError("complete_square requires at least one term")
    center = pert.centroid
    at_center = pert.evaluate(center)
    delta = as_point(y, center.shape[0]) - center
    return at_center, at_center + 0.5 * pert.total_weight * float(delta @ delta)


def _separable_prox(problem: ProblemInstance, kappa: float, wbar: np.ndarray):
    """Exact coordinatewise minimizer of the separable inner objective."""
    sep = problem.separable
    set_ = problem.set
    lo = set_.lower if isinstance(set_, Box) else np.full(problem.dim, -np.inf)
    hi = set_.upper if isinstance(set_, Box) else np.full(problem.dim, np.inf)
    y = np.empty(problem.dim)
    for c in range(problem.dim):
        gains, roots = sep.gains[c], sep.roots[c]
        if gains.shape[0] == 0:
            t = wbar[c]
        else:
            order = np.argsort(roots, kind="stable")
            r = roots[order]
            g = gains[order]
            total = g.sum()
            # slope of the PL part left of all roots, then across segments
            slope = -total
            t = wbar[c] + total / kappa
            if t >= r[0]:
                t = None
                for k in range(r.shape[0]):
                    slope_after = slope + 2.0 * g[k]
                    left = kappa * (r[k] - wbar[c]) + slope
                    right = kappa * (r[k] - wbar[c]) + slope_after
                    if left <= 0.0 <= right:
                        t = r[k]
                        break
                    cand = wbar[c] - slope_after / kappa
                    upper = r[k + 1] if k + 1 < r.shape[0] else np.inf
                    if r[k] <= cand <= upper:
                        t = cand
                        break
                    slope = slope_after
                if t is None:
                    t = wbar[c] - total / kappa
        y[c] = min(max(t, lo[c]), hi[c])
    return y


def _spectral_norm(matrix: np.ndarray) -> float:
    return float(np.linalg.norm(matrix, 2)) if matrix.size else 0.0


def _combined_quadratic(problem: ProblemInstance, lam: float, x: np.ndarray):
    """Total modulus and weighted center of all quadratic terms plus the prox term."""
    kappa = 1.0 / lam
    acc = x / lam
    for a, z in problem.quad_terms:
        kappa += a
        acc = acc + a * z
    return kappa, acc / kappa


def _face_polish(form: MaxAffineForm, set_, kappa: float, wbar: np.ndarray,
                 y0: np.ndarray, u0: np.ndarray):
    """Solve the KKT system on the face identified by the iterative solve.

    Returns a feasible ``(y, u)`` pair or ``None`` when the guessed face is
    inconsistent.  Only boxes and inactive ball constraints are handled; the
    duality gap of the polished pair is evaluated by the caller.
    """
    d = wbar.shape[0]
    if isinstance(set_, Box):
        span = np.maximum(set_.upper - set_.lower, 1.0)
        up = y0 >= set_.upper - 1e-9 * span
        dn = (y0 <= set_.lower + 1e-9 * span) & ~up
        pinned = up | dn
    elif isinstance(set_, Ball):
        if float(np.linalg.norm(y0 - set_.center)) >= set_.radius * (1.0 - 1e-9):
            return None
        pinned = np.zeros(d, dtype=bool)
        up = dn = pinned
    else:
        return None
    free = ~pinned
    f = int(free.sum())
    y_pin = np.where(up, getattr(set_, "upper", 0.0), 0.0) + np.where(dn, getattr(set_, "lower", 0.0), 0.0)

    mat, off = form.matrix, form.offsets
    m = mat.shape[0]
    scores0 = mat @ y0 + off
    if form.dual == "simplex":
        active = (u0 > 1e-10) | (scores0 >= scores0.max() - 1e-9 * max(1.0, abs(scores0.max())))
        idx = np.nonzero(active)[0]
        k = idx.shape[0]
        n_var = f + k + 1  # y_free, w_active, shared score level
        a_sys = np.zeros((f + k + 1, n_var))
        rhs = np.zeros(f + k + 1)
        # stationarity on free coordinates
        a_sys[:f, :f] = kappa * np.eye(f)
        a_sys[:f, f:f + k] = mat[np.ix_(idx, np.nonzero(free)[0])].T
        rhs[:f] = kappa * wbar[free]
        # equal scores on the active pieces
        a_sys[f:f + k, :f] = mat[np.ix_(idx, np.nonzero(free)[0])]
        a_sys[f:f + k, f + k] = -1.0
        rhs[f:f + k] = -off[idx] - mat[np.ix_(idx, np.nonzero(pinned)[0])] @ y_pin[pinned]
        a_sys[f + k, f:f + k] = 1.0
        rhs[f + k] = 1.0
        sol, *_ = np.linalg.lstsq(a_sys, rhs, rcond=None)
        y = y0.copy()
        y[free] = sol[:f]
        w = sol[f:f + k]
        if np.any(w < -1e-10) or not np.all(np.isfinite(sol)):
            return None
        w = np.maximum(w, 0.0)
        tot = w.sum()
        if tot <= 0:
            return None
        w /= tot
        u = np.zeros(m)
        u[idx] = w
    else:
        tied = (np.abs(scores0) <= 1e-9 * max(1.0, float(np.abs(scores0).max()))) | (np.abs(u0) < 1.0 - 1e-9)
        idx = np.nonzero(tied)[0]
        k = idx.shape[0]
        u_fix = np.sign(scores0) * (~tied)
        a_sys = np.zeros((f + k, f + k))
        rhs = np.zeros(f + k)
        a_sys[:f, :f] = kappa * np.eye(f)
        a_sys[:f, f:] = mat[np.ix_(idx, np.nonzero(free)[0])].T
        rhs[:f] = kappa * wbar[free] - mat[:, free].T @ u_fix
        a_sys[f:, :f] = mat[np.ix_(idx, np.nonzero(free)[0])]
        rhs[f:] = -off[idx] - mat[np.ix_(idx, np.nonzero(pinned)[0])] @ y_pin[pinned]
        sol, *_ = np.linalg.lstsq(a_sys, rhs, rcond=None)
        if not np.all(np.isfinite(sol)):
            return None
        y = y0.copy()
        y[free] = sol[:f]
        u = u_fix.astype(float).copy()
        u[idx] = np.clip(sol[f:], -1.0, 1.0)
    if isinstance(set_, Box):
        if np.any(y[free] < set_.lower[free] - 1e-12 * span[free]) or np.any(
            y[free] > set_.upper[free] + 1e-12 * span[free]
        ):
            return None
        y = np.clip(y, set_.lower, set_.upper)
        # normal-cone sign check on pinned coordinates
        resid = form.matrix.T @ u + kappa * (y - wbar)
        if np.any(resid[up] < -1e-8) or np.any(resid[dn] > 1e-8):
            return None
    elif isinstance(set_, Ball):
        if float(np.linalg.norm(y - set_.center)) > set_.radius:
            return None
    return y, u


def _dual_gap(form: MaxAffineForm, y: np.ndarray, u: np.ndarray) -> float:
    scores = form.matrix @ y + form.offsets
    gval = float(scores.max()) if form.dual == "simplex" else float(np.abs(scores).sum())
    return gval - float(u @ scores)


def prox(problem: ProblemInstance, lam: float, x, tol: float,
         max_iter: int = 500_000) -> ProxResult:
    """Proximal point of the constrained objective at ``x``.

    Minimizes ``value(y) + ||y - x||^2 / (2 lam)`` over the constraint set
    and certifies the result to optimality gap ``tol``.  Raises
    ``ProxToleranceError`` (carrying the best certified residual) when the
    certificate cannot reach ``tol`` within the iteration cap, and
    ``UnsupportedInstanceError`` for unstructured problems.
    """
    if not lam > 0:
        raise PreconditionError("envelope parameter must be positive")
    if not tol > 0:
        raise PreconditionError("tolerance must be positive")
    p = problem.check_point(x)
    kappa, wbar = _combined_quadratic(problem, lam, p)

    if problem.separable is not None and isinstance(problem.set, Box):
        y = _separable_prox(problem, kappa, wbar)
        residual = 0.0
    elif problem.structure is not None:
        form = problem.structure
        set_kind, sp0, sp1 = problem.set.kernel_spec()
        dual_kind = 0 if form.dual == "simplex" else 1
        m = form.matrix.shape[0]
        lip = _spectral_norm(form.matrix) ** 2 / kappa
        if lip == 0.0:
            y = problem.set.project(wbar)
            residual = 0.0
        else:
            u0 = np.full(m, 1.0 / m) if dual_kind == 0 else np.zeros(m)
            y, u, gap, _ = dual_prox_loop(
                form.matrix, form.offsets, dual_kind, set_kind, sp0, sp1,
                kappa, wbar, lip, tol * 0.5, max_iter, 20, u0,
            )
            residual = float(gap)
            polished = _face_polish(form, problem.set, kappa, wbar, y, u)
            if polished is not None:
                gap_p = _dual_gap(form, *polished)
                scale = 1.0 + abs(problem.value(polished[0]))
                if -1e-12 * scale <= gap_p < residual:
                    y, u = polished
                    residual = max(gap_p, 0.0)
            if residual > tol and isinstance(problem.set, (Ball, Box)):
                # strong-convexity bound through a min-norm subgradient estimate
                dist = min_norm_subgradient(problem, y, extra_fixed=kappa * (y - wbar))
                residual = min(residual, dist * dist / (2.0 * kappa))
            if residual > tol:
                raise ProxToleranceError(
                    f"inner prox solve for {problem.name} missed tol={tol:g}", residual
                )
    else:
        raise UnsupportedInstanceError(
            f"{problem.name}: proximal solve needs a structured or separable objective"
        )

    grad = (p - y) / lam
    delta = y - p
    env_val = problem.value(y) + 0.5 / lam * float(delta @ delta)
    return ProxResult(prox_point=y, envelope_value=env_val, gradient=grad, residual=residual)


def envelope_gradient(problem: ProblemInstance, lam: float, x, tol: float) -> np.ndarray:
    """Gradient of the envelope, ``(x - prox(x)) / lam``."""
    return prox(problem, lam, x, tol).gradient


def envelope_of_regularization(
    h: ProblemInstance,
    pert: QuadraticPerturbation,
    modulus: float,
    x,
    tol: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the envelope identity for a quadratically perturbed objective.

    For ``f = h + pert`` and envelope parameter ``1 / modulus``, the gradient
    of ``f``'s envelope at ``x`` equals
    ``modulus / (modulus + A) * (grad of h's envelope at the centroid
    + sum_i a_i (x - z_i))`` with ``A`` the total perturbation weight.  The
    left side is computed by a direct proximal solve on ``f``, the right side
    through a proximal solve on ``h`` at the centroid.
    """
    if not modulus > 0:
        raise PreconditionError("modulus must be positive")
    if not pert.terms:
        raise PreconditionError("perturbation must have at least one term")
    p = h.check_point(x)
    f_problem = dataclasses.replace(h, quad_terms=h.quad_terms + pert.terms)
    lhs = envelope_gradient(f_problem, 1.0 / modulus, p, tol)

    total = pert.total_weight
    xbar = (modulus * p + total * pert.centroid) / (modulus + total)
    grad_h = envelope_gradient(h, 1.0 / (modulus + total), xbar, tol)
    acc = grad_h.copy()
    for a, z in pert.terms:
        acc += a * (p - z)
    rhs = modulus / (modulus + total) * acc
    return lhs, rhs


@dataclass(frozen=True)
class WitnessResult:
    """Certificate that the queried point is near a nearly stationary point."""

    step: float
    descent: float
    stationarity: float | None
    gradient_norm: float
    prox_point: np.ndarray


def near_stationarity_witness(
    problem: ProblemInstance, lam: float, x, tol: float = DEFAULT_WITNESS_TOL
) -> WitnessResult:
    """Evaluate the three near-stationarity inequalities at ``x``.

    The proximal point ``xh`` satisfies ``||xh - x|| = lam * ||grad||``,
    ``value(xh) <= value(x)`` and ``dist(0, subdifferential at xh) <=
    ||grad||``, all up to ``tol``.  When the instance has no subdifferential
    model (or the set has no normal-cone support) the third component is
    ``None`` and the witness is partial.
    """
    p = problem.check_point(x)
    inner_tol = max(1e-15, min(tol, lam * tol * tol / 8.0))
    pr = prox(problem, lam, p, inner_tol)
    step = float(np.linalg.norm(pr.prox_point - p))
    descent = problem.value(p) - problem.value(pr.prox_point)
    grad_norm = float(np.linalg.norm(pr.gradient))
    try:
        stat = min_norm_subgradient(problem, pr.prox_point)
    except UnsupportedInstanceError:
        stat = None
    return WitnessResult(step=step, descent=descent, stationarity=stat,
                         gradient_norm=grad_norm, prox_point=pr.prox_point)
