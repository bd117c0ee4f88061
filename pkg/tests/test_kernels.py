"""Compiled and pure-Python paths must draw identical streams and agree."""

import numpy as np

from gradreg import Ball, Box, PssmConfig, generate, pssm_sc, seeded_stream
from gradreg.algorithms import _checkpoint_array, _pssm_python
from gradreg import kernels


def _run_both(problem, mu, T, seed):
    cfg = PssmConfig(np.zeros(problem.dim), mu, T)
    fast = pssm_sc(cfg, problem.oracle, problem.set, seeded_stream(seed))
    chk = _checkpoint_array((), T - 1)
    slow, _ = _pssm_python(
        seeded_stream(seed), np.zeros(problem.dim), mu, T, problem.oracle, problem.set, chk
    )
    return fast, slow


def test_l1_kernel_matches_python_loop():
    problem = generate("l1_regression", 3, 21, {"rows": 7})
    fast, slow = _run_both(problem, 0.7, 200, 5)
    assert np.array_equal(fast, slow)


def test_plmax_kernel_matches_python_loop():
    problem = generate(
        "piecewise_linear_max", 4, 22,
        {"pieces": 6, "noise": 0.3, "set": {"kind": "ball", "center": [0.0] * 4, "radius": 1.2}},
    )
    fast, slow = _run_both(problem, 1.1, 150, 6)
    assert np.array_equal(fast, slow)


def test_shifted_kernel_matches_python_loop():
    problem = generate("l1_regression", 2, 23, {"rows": 5})
    shifted = problem.oracle.shifted(0.9, np.array([0.2, -0.2]))
    cfg = PssmConfig(np.zeros(2), 1.0, 120)
    fast = pssm_sc(cfg, shifted, problem.set, seeded_stream(9))
    chk = _checkpoint_array((), 119)
    slow, _ = _pssm_python(seeded_stream(9), np.zeros(2), 1.0, 120, shifted, problem.set, chk)
    assert np.array_equal(fast, slow)


def test_simplex_projection_kernel_matches_python():
    from gradreg.sets import Simplex

    simp = Simplex(6, 1.0)
    rng = seeded_stream(3)
    kind, p0, p1 = simp.kernel_spec()
    for _ in range(200):
        x = rng.standard_normal(6) * 2.0
        want = simp.project(x)
        got = kernels._project(kind, p0, p1, x.copy())
        assert np.allclose(got, want, atol=1e-12)


def test_sample_stats_match_scalar_draws():
    problem = generate("l1_regression", 3, 24, {"rows": 6})
    kd = problem.oracle.kernel_data
    x = np.array([0.1, -0.2, 0.3])
    n = 500
    mean, _var, sqnorm = kernels.l1_sample_stats(seeded_stream(77), kd[1], kd[2], x, n)
    rng = seeded_stream(77)
    draws = np.stack([problem.oracle.sample(x, rng) for _ in range(n)])
    assert np.allclose(mean, draws.mean(axis=0), atol=1e-15)
    assert np.isclose(sqnorm, (draws**2).sum(axis=1).mean(), atol=1e-12)


def test_dual_prox_kernel_matches_grid():
    # one-dimensional max-affine prox against a dense grid
    mat = np.array([[1.0], [-0.5], [0.2]])
    off = np.array([0.0, 0.3, -0.1])
    kind, p0, p1 = Box([-5.0], [5.0]).kernel_spec()
    x, lam = 1.3, 0.7
    kappa = 1.0 / lam
    wbar = np.array([x])
    lip = float(np.linalg.norm(mat, 2) ** 2) / kappa
    u0 = np.full(3, 1.0 / 3.0)
    y, _u, gap, _ = kernels.dual_prox_loop(
        mat, off, 0, kind, p0, p1, kappa, wbar, lip, 1e-12, 100_000, 10, u0
    )
    ts = np.linspace(-5.0, 5.0, 400_001)
    vals = np.max(ts[:, None] * mat[:, 0][None, :] + off[None, :], axis=1) + 0.5 / lam * (ts - x) ** 2
    t_best = ts[int(np.argmin(vals))]
    assert gap <= 1e-12
    assert abs(y[0] - t_best) <= 5e-5
