"""Compiled inner loops for the solvers and the dual proximal solve.

Every kernel consumes the caller's ``numpy.random.Generator`` directly, so
compiled and pure-Python paths draw bit-identical streams.  Kernels use
strict IEEE arithmetic (no fastmath) to keep runs reproducible.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# family codes for base samplers
FAM_PLMAX = 0
FAM_L1 = 1

# set codes mirror gradreg.sets
K_BALL, K_BOX, K_SIMPLEX = 0, 1, 2


@njit(cache=True, nogil=True)
def _project(kind, p0, p1, x):
    d = x.shape[0]
    if kind == K_BALL:
        r = p1[0]
        n = 0.0
        for i in range(d):
            dx = x[i] - p0[i]
            n += dx * dx
        n = np.sqrt(n)
        if n > r:
            c = r / n
            for i in range(d):
                x[i] = p0[i] + (x[i] - p0[i]) * c
    elif kind == K_BOX:
        for i in range(d):
            if x[i] < p0[i]:
                x[i] = p0[i]
            elif x[i] > p1[i]:
                x[i] = p1[i]
    else:
        s = p1[0]
        u = np.sort(x)[::-1]
        css = 0.0
        theta = 0.0
        rho = -1
        for i in range(d):
            css += u[i]
            t = (css - s) / (i + 1.0)
            if u[i] - t > 0.0:
                rho = i
                theta = t
        for i in range(d):
            v = x[i] - theta
            x[i] = v if v > 0.0 else 0.0
    return x


@njit(cache=True, nogil=True)
def _sample_base(family, mat, off, sigma, x, rng, out):
    """Draw one base subgradient into ``out`` (fixed stream order)."""
    m, d = mat.shape
    if family == FAM_PLMAX:
        best = 0
        bv = -np.inf
        for j in range(m):
            v = off[j]
            for k in range(d):
                v += mat[j, k] * x[k]
            if v > bv:
                bv = v
                best = j
        for k in range(d):
            out[k] = mat[best, k]
        if sigma > 0.0:
            z = rng.standard_normal(d)
            u = rng.random()
            nz = 0.0
            for k in range(d):
                nz += z[k] * z[k]
            nz = np.sqrt(nz)
            if nz > 0.0:
                c = sigma * u ** (1.0 / d) / nz
                for k in range(d):
                    out[k] += c * z[k]
    else:
        j = rng.integers(0, m)
        r = off[j]
        for k in range(d):
            r += mat[j, k] * x[k]
        s = 1.0 if r > 0.0 else (-1.0 if r < 0.0 else 0.0)
        for k in range(d):
            out[k] = s * mat[j, k]


@njit(cache=True, nogil=True)
def pssm_loop(rng, x0, mu, T, family, mat, off, sigma, shift_w, shift_vec,
              set_kind, sp0, sp1, checkpoints):
    """Weighted-average projected stochastic subgradient loop.

    Runs steps ``t = 0 .. T-2`` with step size ``2 / (mu (t+1))`` and
    returns the (t+1)-weighted average of ``x_0 .. x_{T-1}`` together with
    the running average recorded at each oracle-call count in
    ``checkpoints`` (sorted, strictly increasing).
    """
    d = x0.shape[0]
    x = x0.copy()
    s = x.copy()  # running weighted sum, weight (t+1) on x_t
    g = np.empty(d)
    n_chk = checkpoints.shape[0]
    chk = np.empty((n_chk, d))
    ci = 0
    for t in range(T - 1):
        _sample_base(family, mat, off, sigma, x, rng, g)
        if shift_w > 0.0:
            for k in range(d):
                g[k] += shift_w * x[k] - shift_vec[k]
        step = 2.0 / (mu * (t + 1.0))
        for k in range(d):
            x[k] -= step * g[k]
        _project(set_kind, sp0, sp1, x)
        w = t + 2.0
        for k in range(d):
            s[k] += w * x[k]
        calls = t + 1
        if ci < n_chk and calls == checkpoints[ci]:
            norm = 2.0 / ((t + 2.0) * (t + 3.0))
            for k in range(d):
                chk[ci, k] = norm * s[k]
            ci += 1
    xbar = np.empty(d)
    norm = 2.0 / (T * (T + 1.0))
    for k in range(d):
        xbar[k] = norm * s[k]
    return xbar, chk


@njit(cache=True, nogil=True)
def psgd_loop(rng, x0, step_scale, T, family, mat, off, sigma, shift_w, shift_vec,
              set_kind, sp0, sp1, checkpoints):
    """Uniform-average projected stochastic subgradient with step c/sqrt(t+1)."""
    d = x0.shape[0]
    x = x0.copy()
    s = x.copy()
    g = np.empty(d)
    n_chk = checkpoints.shape[0]
    chk = np.empty((n_chk, d))
    ci = 0
    for t in range(T - 1):
        _sample_base(family, mat, off, sigma, x, rng, g)
        if shift_w > 0.0:
            for k in range(d):
                g[k] += shift_w * x[k] - shift_vec[k]
        step = step_scale / np.sqrt(t + 1.0)
        for k in range(d):
            x[k] -= step * g[k]
        _project(set_kind, sp0, sp1, x)
        for k in range(d):
            s[k] += x[k]
        calls = t + 1
        if ci < n_chk and calls == checkpoints[ci]:
            for k in range(d):
                chk[ci, k] = s[k] / (t + 2.0)
            ci += 1
    xbar = np.empty(d)
    for k in range(d):
        xbar[k] = s[k] / T
    return xbar, chk


@njit(cache=True, nogil=True)
def _proj_dual(dual_kind, u):
    m = u.shape[0]
    if dual_kind == 0:
        # unit simplex
        srt = np.sort(u)[::-1]
        css = 0.0
        theta = 0.0
        for i in range(m):
            css += srt[i]
            t = (css - 1.0) / (i + 1.0)
            if srt[i] - t > 0.0:
                theta = t
        for i in range(m):
            v = u[i] - theta
            u[i] = v if v > 0.0 else 0.0
    else:
        for i in range(m):
            if u[i] > 1.0:
                u[i] = 1.0
            elif u[i] < -1.0:
                u[i] = -1.0
    return u


@njit(cache=True, nogil=True)
def dual_prox_loop(mat, off, dual_kind, set_kind, sp0, sp1, kappa, wbar,
                   lip, tol, max_iter, check_every, u0):
    """Accelerated dual ascent for the structured proximal subproblem.

    Solves ``min_{y in X} g(y) + (kappa/2) ||y - wbar||^2`` through its
    concave dual over the conjugate set (simplex or box), with gradient-based
    adaptive restarts.  Returns the best primal/dual pair found and its
    duality gap ``g(y) - <u, A y + b>``, a certified optimality gap.
    """
    m, d = mat.shape
    u = u0.copy()
    _proj_dual(dual_kind, u)
    v = u.copy()
    u_prev = u.copy()
    t_acc = 1.0
    y = np.empty(d)
    scores = np.empty(m)
    best_gap = np.inf
    best_y = np.empty(d)
    best_u = u.copy()
    iters = 0
    for it in range(max_iter):
        iters = it + 1
        # y(v) = proj_X(wbar - A^T v / kappa)
        for k in range(d):
            acc = 0.0
            for j in range(m):
                acc += mat[j, k] * v[j]
            y[k] = wbar[k] - acc / kappa
        _project(set_kind, sp0, sp1, y)
        for j in range(m):
            acc = off[j]
            for k in range(d):
                acc += mat[j, k] * y[k]
            scores[j] = acc
        # ascent step from the extrapolated point
        dot_restart = 0.0
        for j in range(m):
            un = v[j] + scores[j] / lip
            u_prev[j] = u[j]
            u[j] = un
        _proj_dual(dual_kind, u)
        for j in range(m):
            dot_restart += scores[j] * (u[j] - u_prev[j])
        if dot_restart < 0.0:
            t_acc = 1.0
            for j in range(m):
                v[j] = u[j]
        else:
            t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_acc * t_acc))
            beta = (t_acc - 1.0) / t_new
            for j in range(m):
                v[j] = u[j] + beta * (u[j] - u_prev[j])
            t_acc = t_new
        if it % check_every == 0 or it == max_iter - 1:
            # candidate from the current dual point
            for k in range(d):
                acc = 0.0
                for j in range(m):
                    acc += mat[j, k] * u[j]
                y[k] = wbar[k] - acc / kappa
            _project(set_kind, sp0, sp1, y)
            gval = -np.inf if dual_kind == 0 else 0.0
            udot = 0.0
            for j in range(m):
                acc = off[j]
                for k in range(d):
                    acc += mat[j, k] * y[k]
                udot += u[j] * acc
                if dual_kind == 0:
                    if acc > gval:
                        gval = acc
                else:
                    gval += abs(acc)
            gap = gval - udot
            if gap < best_gap:
                best_gap = gap
                for k in range(d):
                    best_y[k] = y[k]
                for j in range(m):
                    best_u[j] = u[j]
            if best_gap <= tol:
                break
    return best_y, best_u, best_gap, iters


@njit(cache=True, nogil=True)
def l1_sample_stats(rng, mat, off, x, n_samples):
    """Mean, per-coordinate variance and mean squared norm of oracle draws."""
    m, d = mat.shape
    g = np.empty(d)
    mean = np.zeros(d)
    sq = np.zeros(d)
    sqnorm = 0.0
    for _ in range(n_samples):
        _sample_base(FAM_L1, mat, off, 0.0, x, rng, g)
        for k in range(d):
            mean[k] += g[k]
            sq[k] += g[k] * g[k]
            sqnorm += g[k] * g[k]
    for k in range(d):
        mean[k] /= n_samples
        sq[k] = sq[k] / n_samples - mean[k] * mean[k]
    return mean, sq, sqnorm / n_samples


@njit(cache=True, nogil=True)
def plmax_sample_stats(rng, mat, off, sigma, x, n_samples):
    m, d = mat.shape
    g = np.empty(d)
    mean = np.zeros(d)
    sq = np.zeros(d)
    sqnorm = 0.0
    for _ in range(n_samples):
        _sample_base(FAM_PLMAX, mat, off, sigma, x, rng, g)
        for k in range(d):
            mean[k] += g[k]
            sq[k] += g[k] * g[k]
            sqnorm += g[k] * g[k]
    for k in range(d):
        mean[k] /= n_samples
        sq[k] = sq[k] / n_samples - mean[k] * mean[k]
    return mean, sq, sqnorm / n_samples
