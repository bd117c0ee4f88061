import math

import numpy as np
import pytest
from conftest import grid_minimize_1d

from gradreg import (
    Ball,
    Box,
    PreconditionError,
    ProxToleranceError,
    QuadraticPerturbation,
    SubgradientOracle,
    UnsupportedInstanceError,
    complete_square,
    envelope_gradient,
    envelope_of_regularization,
    generate,
    l1_regression_instance,
    near_stationarity_witness,
    piecewise_linear_max_instance,
    prox,
    seeded_stream,
)
from gradreg.problem import ProblemInstance


def test_prox_of_zero_objective():
    flat = piecewise_linear_max_instance(
        np.zeros((1, 2)), np.zeros(1), 0.0, Ball(np.zeros(2), 1e6), name="zero"
    )
    x = np.array([3.0, -4.0])
    res = prox(flat, 2.5, x, 1e-12)
    assert np.allclose(res.prox_point, x)
    assert np.allclose(res.gradient, 0.0)
    assert res.envelope_value == pytest.approx(0.0, abs=1e-18)


def test_prox_abs_matches_grid(abs_problem):
    # oracle: dense 1-D grid minimization of |y| + (y-3)^2 / 2 over the box
    t_grid, _ = grid_minimize_1d(lambda t: abs(t) + 0.5 * (t - 3.0) ** 2, -10.0, 10.0)
    res = prox(abs_problem, 1.0, np.array([3.0]), 1e-12)
    assert abs(res.prox_point[0] - t_grid) <= 1e-4
    assert res.prox_point[0] == pytest.approx(2.0, abs=1e-12)
    assert res.gradient[0] == pytest.approx(1.0, abs=1e-12)

    t_grid, _ = grid_minimize_1d(lambda t: abs(t) + 0.5 * (t - 0.5) ** 2, -10.0, 10.0)
    res = prox(abs_problem, 1.0, np.array([0.5]), 1e-12)
    assert abs(res.prox_point[0] - t_grid) <= 1e-4
    assert res.prox_point[0] == pytest.approx(0.0, abs=1e-12)
    assert res.gradient[0] == pytest.approx(0.5, abs=1e-12)


def test_prox_consistency_identity():
    # lam * gradient + prox_point reconstructs the query point
    problems = [
        generate("l1_regression", 3, 31, {"rows": 7}),
        generate("piecewise_linear_max", 3, 32, {"pieces": 5}),
    ]
    rng = seeded_stream(5)
    for problem in problems:
        for _ in range(20):
            lam = 0.3 + 2.0 * rng.random()
            x = problem.set.sample(rng)
            res = prox(problem, lam, x, 1e-9)
            assert np.allclose(lam * res.gradient + res.prox_point, x, rtol=1e-12, atol=1e-12)
            assert res.residual <= 1e-9


def test_prox_residual_certified_against_grid():
    # certified envelope value stays within the residual of the grid optimum
    problem = generate(
        "piecewise_linear_max", 1, 33,
        {"pieces": 4, "set": {"kind": "box", "lower": [-3.0], "upper": [3.0]}},
    )
    x = np.array([0.7])
    lam = 0.9
    res = prox(problem, lam, x, 1e-10)
    _, v_grid = grid_minimize_1d(
        lambda t: problem.value(np.array([t])) + 0.5 / lam * (t - x[0]) ** 2, -3.0, 3.0
    )
    assert res.envelope_value <= v_grid + 1e-9
    assert res.envelope_value >= v_grid - res.residual - 1e-9


def test_envelope_gradient_lipschitz_property():
    problem = generate("piecewise_linear_max", 4, 34, {"pieces": 6})
    rng = seeded_stream(6)
    tol = 1e-10
    for lam in (0.5, 1.5):
        for _ in range(15):
            x, y = problem.set.sample(rng), problem.set.sample(rng)
            gx = envelope_gradient(problem, lam, x, tol)
            gy = envelope_gradient(problem, lam, y, tol)
            bound = np.linalg.norm(x - y) / lam + 2.0 * tol / lam
            assert np.linalg.norm(gx - gy) <= bound + 1e-9


def test_envelope_gradient_vanishes_at_minimizer():
    problem = generate(
        "piecewise_linear_max", 3, 35,
        {"pieces": 5, "designed": True,
         "set": {"kind": "ball", "center": [0.0, 0.0, 0.0], "radius": 1.0}},
    )
    tol = 1e-12
    grad = envelope_gradient(problem, 0.7, problem.known_min[0], tol)
    assert np.linalg.norm(grad) <= tol / 0.7 + 1e-10


def test_complete_square_examples():
    single = QuadraticPerturbation(((2.0, np.array([1.0, 0.0])),))
    at_center, reconstructed = complete_square(single, np.array([0.0, 0.0]))
    assert at_center == pytest.approx(0.0)
    assert reconstructed == pytest.approx(1.0)

    pair = QuadraticPerturbation(((1.0, np.array([1.0, 0.0])), (1.0, np.array([-1.0, 0.0]))))
    at_center, reconstructed = complete_square(pair, np.array([0.0, 0.0]))
    assert np.allclose(pair.centroid, [0.0, 0.0])
    assert at_center == pytest.approx(1.0)
    assert reconstructed == pytest.approx(1.0)


def test_complete_square_random_identity():
    rng = seeded_stream(7)
    for _ in range(300):
        d = int(rng.integers(1, 11))
        terms = tuple(
            (float(0.1 + rng.random()), rng.standard_normal(d)) for _ in range(int(rng.integers(1, 6)))
        )
        pert = QuadraticPerturbation(terms)
        y = rng.standard_normal(d) * 2.0
        direct = sum(0.5 * a * float((y - z) @ (y - z)) for a, z in terms)
        _, reconstructed = complete_square(pert, y)
        assert abs(direct - reconstructed) <= 1e-10 * (1.0 + abs(direct))
        # the centroid matches an independent recomputation
        total = sum(a for a, _ in terms)
        manual = sum((a * z for a, z in terms), start=np.zeros(d)) / total
        assert np.linalg.norm(pert.centroid - manual) <= 1e-12 * (1.0 + np.linalg.norm(manual))


def test_complete_square_requires_terms():
    with pytest.raises(PreconditionError):
        complete_square(QuadraticPerturbation(()), np.zeros(2))
    with pytest.raises(PreconditionError):
        QuadraticPerturbation(((-1.0, np.zeros(2)),))


def test_envelope_shift_hand_worked_case(abs_problem):
    # h = |.|, one unit term at 0, modulus 1, x = 3: both sides equal 2
    pert = QuadraticPerturbation(((1.0, np.array([0.0])),))
    lhs, rhs = envelope_of_regularization(abs_problem, pert, 1.0, np.array([3.0]), 1e-10)
    assert lhs[0] == pytest.approx(2.0, abs=1e-9)
    assert rhs[0] == pytest.approx(2.0, abs=1e-9)

    # grid oracle for the direct side: argmin |y| + 0.5 y^2 + 0.5 (y-3)^2
    t_grid, _ = grid_minimize_1d(
        lambda t: abs(t) + 0.5 * t * t + 0.5 * (t - 3.0) ** 2, -10.0, 10.0
    )
    assert abs(1.0 * (3.0 - t_grid) - lhs[0]) <= 1e-4


def test_envelope_shift_flat_objective():
    flat = piecewise_linear_max_instance(
        np.zeros((1, 2)), np.zeros(1), 0.0, Box([-5.0, -5.0], [5.0, 5.0]), name="flat"
    )
    pert = QuadraticPerturbation(((0.8, np.array([1.0, -1.0])), (1.2, np.array([0.5, 0.5]))))
    x = np.array([0.3, 0.4])
    modulus = 2.0
    lhs, rhs = envelope_of_regularization(flat, pert, modulus, x, 1e-12)
    acc = sum((a * (x - z) for a, z in pert.terms), start=np.zeros(2))
    closed = modulus / (modulus + pert.total_weight) * acc
    assert np.allclose(lhs, closed, atol=1e-10)
    assert np.allclose(rhs, closed, atol=1e-10)


def test_envelope_shift_random_instances():
    rng = seeded_stream(8)
    for _ in range(15):
        d = int(rng.integers(1, 4))
        rows = int(rng.integers(2, 6))
        mat = np.zeros((rows, d))
        cols = rng.integers(0, d, size=rows)
        for k in range(rows):
            mat[k, cols[k]] = 0.4 + rng.random()
        problem = l1_regression_instance(
            mat, rng.standard_normal(rows), Box(np.full(d, -4.0), np.full(d, 4.0))
        )
        pert = QuadraticPerturbation(
            tuple((float(0.3 + rng.random()), rng.standard_normal(d)) for _ in range(2))
        )
        modulus = 0.4 + 2.0 * rng.random()
        x = rng.standard_normal(d)
        lhs, rhs = envelope_of_regularization(problem, pert, modulus, x, 1e-10)
        assert np.linalg.norm(lhs - rhs) <= 1e-7


def test_finite_difference_gradient_check():
    problem = generate(
        "l1_regression", 2, 36,
        {"rows": 5, "axis_aligned": True,
         "set": {"kind": "box", "lower": [-4.0, -4.0], "upper": [4.0, 4.0]}},
    )
    rng = seeded_stream(9)
    h = 1e-5
    lam = 0.8
    checked = 0
    for _ in range(40):
        x = rng.standard_normal(2)
        grad = prox(problem, lam, x, 1e-13).gradient
        fd = np.empty(2)
        kink = False
        for c in range(2):
            xp, xm = x.copy(), x.copy()
            xp[c] += h
            xm[c] -= h
            vp = prox(problem, lam, xp, 1e-13).envelope_value
            vm = prox(problem, lam, xm, 1e-13).envelope_value
            fd[c] = (vp - vm) / (2 * h)
            # skip points whose inner solution straddles a kink
            yp = prox(problem, lam, xp, 1e-13).prox_point
            ym = prox(problem, lam, xm, 1e-13).prox_point
            if np.linalg.norm(yp - ym) > 3.0 * h:
                kink = True
        if kink:
            continue
        assert np.linalg.norm(grad - fd) <= 1e-4
        checked += 1
    assert checked >= 10


def test_witness_hand_worked_abs(abs_problem):
    wit = near_stationarity_witness(abs_problem, 1.0, np.array([3.0]), 1e-8)
    assert wit.step == pytest.approx(1.0, abs=1e-8)
    assert wit.descent == pytest.approx(1.0, abs=1e-8)
    assert wit.stationarity == pytest.approx(1.0, abs=1e-8)
    assert wit.stationarity <= wit.gradient_norm + 1e-8


def test_witness_at_minimizer(abs_problem):
    wit = near_stationarity_witness(abs_problem, 0.5, np.array([0.0]), 1e-9)
    assert abs(wit.step) <= 1e-9
    assert abs(wit.descent) <= 1e-9
    assert wit.stationarity <= 1e-9


def test_witness_partial_without_normal_cone_support():
    from gradreg import Simplex

    linear = piecewise_linear_max_instance(
        np.array([[1.0, 0.5, -0.2]]), np.zeros(1), 0.0, Simplex(3, 1.0), name="linear-simplex"
    )
    wit = near_stationarity_witness(linear, 0.7, np.array([0.2, 0.3, 0.5]), 1e-6)
    assert wit.stationarity is None
    assert wit.descent >= -1e-6


def test_witness_random_inequalities():
    problem = generate("piecewise_linear_max", 3, 37, {"pieces": 5,
                       "set": {"kind": "box", "lower": [-2.0] * 3, "upper": [2.0] * 3}})
    rng = seeded_stream(10)
    for _ in range(20):
        lam = 0.4 + rng.random()
        x = problem.set.sample(rng)
        wit = near_stationarity_witness(problem, lam, x, 1e-6)
        assert abs(wit.step - lam * wit.gradient_norm) <= 1e-6
        assert wit.descent >= -1e-6
        assert wit.stationarity <= wit.gradient_norm + 1e-6


def test_prox_unsupported_instance():
    oracle = SubgradientOracle(lambda x, rng: np.sign(x), 1.0, 2.0)
    blackbox = ProblemInstance(
        value_fn=lambda x: float(np.abs(x).sum()),
        oracle=oracle,
        set=Box([-1.0], [1.0]),
        lipschitz=1.0,
        diameter=2.0,
        name="blackbox",
    )
    with pytest.raises(UnsupportedInstanceError):
        prox(blackbox, 1.0, np.array([0.5]), 1e-6)


def test_prox_tolerance_error_carries_residual():
    problem = generate("piecewise_linear_max", 3, 38, {"pieces": 8})
    with pytest.raises(ProxToleranceError) as err:
        prox(problem, 1.0, np.array([0.3, -0.2, 0.1]), 1e-16, max_iter=1)
    assert err.value.residual > 0.0


def test_prox_rejects_bad_parameters(abs_problem):
    with pytest.raises(PreconditionError):
        prox(abs_problem, -1.0, np.array([0.0]), 1e-8)
    with pytest.raises(PreconditionError):
        prox(abs_problem, 1.0, np.array([0.0]), 0.0)
