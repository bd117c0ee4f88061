import math

import numpy as np
import pytest

from gradreg import (
    Box,
    ConfigurationError,
    PreconditionError,
    PssmConfig,
    RegularizationSchedule,
    RunTrace,
    SubgradientOracle,
    baseline_psgd,
    generate,
    gr_convex,
    gr_oracle_calls,
    gr_sc,
    pssm_oracle_calls,
    pssm_sc,
    regularization_params,
    rounds_to_match_weight,
    seeded_stream,
    worst_case_budget,
)
from gradreg import kernels


def _quadratic_oracle(mu=1.0):
    return SubgradientOracle(lambda x, rng: mu * x, lipschitz=2.0, diameter=4.0)


def test_pssm_single_iteration_returns_start():
    set_ = Box([-2.0], [2.0])
    out = pssm_sc(PssmConfig(np.array([1.0]), 1.0, 1), _quadratic_oracle(), set_, seeded_stream(0))
    assert np.array_equal(out, np.array([1.0]))
    assert pssm_oracle_calls(1) == 0


def test_pssm_hand_simulation_two_steps():
    # G = x on [-2, 2], mu = 1, T = 2: x1 = -1, weighted average = -1/3
    set_ = Box([-2.0], [2.0])
    out = pssm_sc(PssmConfig(np.array([1.0]), 1.0, 2), _quadratic_oracle(), set_, seeded_stream(0))
    assert out[0] == pytest.approx(-1.0 / 3.0, abs=1e-15)


def test_pssm_matches_scripted_step_through():
    problem = generate("l1_regression", 3, 51, {"rows": 6})
    T, mu = 57, 0.8
    got = pssm_sc(PssmConfig(np.zeros(3), mu, T), problem.oracle, problem.set, seeded_stream(4))
    # independent scripted loop over the same stream
    rng = seeded_stream(4)
    kind, p0, p1 = problem.set.kernel_spec()
    x = np.zeros(3)
    s = x.copy()
    for t in range(T - 1):
        g = problem.oracle.sample(x, rng)
        x = kernels._project(kind, p0, p1, x - (2.0 / (mu * (t + 1.0))) * g)
        s = s + (t + 2.0) * x
    want = (2.0 / (T * (T + 1.0))) * s
    assert np.array_equal(got, want)


def test_pssm_rejects_infeasible_start():
    set_ = Box([-1.0], [1.0])
    with pytest.raises(PreconditionError):
        pssm_sc(PssmConfig(np.array([5.0]), 1.0, 3), _quadratic_oracle(), set_, seeded_stream(0))


def test_pssm_config_validation():
    with pytest.raises(ConfigurationError):
        PssmConfig(np.array([0.0]), -1.0, 5)
    with pytest.raises(ConfigurationError):
        PssmConfig(np.array([0.0]), 1.0, 0)


def test_baseline_single_iteration_and_hand_simulation():
    set_ = Box([-2.0], [2.0])
    out = baseline_psgd(np.array([1.0]), 1.0, 1, _quadratic_oracle(), set_, seeded_stream(0))
    assert np.array_equal(out, np.array([1.0]))
    # two steps: x1 = 1 - 1 = 0, x2 = 0, uniform average = 1/3
    out = baseline_psgd(np.array([1.0]), 1.0, 3, _quadratic_oracle(), set_, seeded_stream(0))
    assert out[0] == pytest.approx(1.0 / 3.0, abs=1e-15)


def test_schedule_recurrences():
    sched = RegularizationSchedule(mu0=1.0)
    for i in range(3):
        sched.push_weight(2.0 ** (i + 1))
    sched.validate()
    assert sched.mus == [2.0, 4.0, 8.0]
    assert sched.partial_sums == [0.0, 2.0, 6.0, 14.0]
    assert [sched.inner_strength(i) for i in range(4)] == [1.0, 3.0, 7.0, 15.0]
    with pytest.raises(ConfigurationError):
        sched.push_weight(10.0)  # breaks doubling


def test_rounds_match_averaging_weight():
    rounds = rounds_to_match_weight(1.0, 6.0)
    assert rounds == 2
    assert 2.0 * (2.0**rounds - 1.0) == 6.0


def test_gr_sc_zero_rounds_equals_inner_solver():
    problem = generate("piecewise_linear_max", 2, 52, {"pieces": 4, "noise": 0.1, "designed": True})
    wrapped_oracle = problem.oracle.shifted(1.0, problem.known_min[0])
    x0 = np.zeros(2)
    a = gr_sc(x0, 1.0, 0.9, 40, 0, wrapped_oracle, problem.set, seeded_stream(3))
    b = pssm_sc(PssmConfig(x0, 1.0, 40), wrapped_oracle, problem.set, seeded_stream(3))
    assert np.array_equal(a, b)


def test_gr_sc_matches_scripted_outer_loop():
    problem = generate("piecewise_linear_max", 2, 53, {"pieces": 4, "noise": 0.2, "designed": True})
    oracle = problem.oracle.shifted(0.5, problem.known_min[0])
    mu, lam, T, rounds = 0.5, 1.1, 25, 3
    x0 = np.zeros(2)
    got = gr_sc(x0, mu, lam, T, rounds, oracle, problem.set, seeded_stream(8))

    rng = seeded_stream(8)
    centers = []
    cur = oracle
    center = x0
    mus = []
    for i in range(rounds + 1):
        strength = mu + sum(mus)
        xhat = pssm_sc(PssmConfig(center, strength, T), cur, problem.set, rng)
        centers.append(xhat)
        if i < rounds:
            mu_next = mu * 2.0 ** (i + 1)
            mus.append(mu_next)
            cur = cur.shifted(mu_next, xhat)
            center = xhat
    total = lam + sum(mus)
    acc = lam * centers[-1]
    for m, xh in zip(mus, centers[:-1]):
        acc = acc + m * xh
    want = acc / total
    assert np.allclose(got, want, atol=1e-15)


def test_gr_oracle_call_accounting():
    problem = generate("l1_regression", 2, 54, {"rows": 5})
    trace = RunTrace()
    T, rho, eps = 30, 1.0, 0.4 * problem.diameter
    gr_convex(np.zeros(2), rho, eps, T, problem, seeded_stream(5), trace=trace)
    _, _, rounds = regularization_params(rho, eps, problem.diameter)
    assert trace.total_calls == gr_oracle_calls(T, rounds)
    calls = [c for c, _ in trace.rows]
    assert calls == sorted(calls)
    assert all(a < b for a, b in zip(calls, calls[1:]))
    for _, point in trace.rows:
        assert problem.set.contains(point, 1e-9)


def test_gr_convex_parameter_identity_and_feasibility():
    problem = generate("piecewise_linear_max", 2, 55, {"pieces": 4, "noise": 0.1})
    rho, eps = 1.3, 0.2 * 2 * 1.3 * problem.diameter / (2 * 1.3)  # any eps <= 2 rho D
    mu, lam, rounds = regularization_params(rho, eps, problem.diameter)
    assert mu + lam == pytest.approx(2 * rho, rel=1e-15)
    z = gr_convex(np.zeros(2), rho, eps, 50, problem, seeded_stream(6))
    assert problem.set.contains(z, 1e-9)


def test_gr_convex_rejects_out_of_range_accuracy():
    problem = generate("l1_regression", 2, 56, {"rows": 4})
    with pytest.raises(PreconditionError):
        gr_convex(np.zeros(2), 1.0, 10.0 * problem.diameter, 10, problem, seeded_stream(0))
    with pytest.raises(PreconditionError):
        regularization_params(1.0, 0.0, 1.0)


def test_regularization_params_worked_values():
    assert regularization_params(1.0, 2.0, 1.0) == (1.0, 1.0, 1)
    mu, lam, rounds = regularization_params(1.0, 0.25, 1.0)
    assert mu == pytest.approx(0.125)
    assert lam == pytest.approx(1.875)
    assert rounds == 3


def test_worst_case_budget_pinned_and_monotone():
    # frozen value for rho = D = L = 1 at the accuracy ceiling
    assert worst_case_budget(1.0, 2.0, 1.0, 1.0) == 812
    budgets = [worst_case_budget(1.0, eps, 1.0, 1.0) for eps in (2.0, 1.0, 0.5, 0.25)]
    assert all(a < b for a, b in zip(budgets, budgets[1:]))
    # halving the accuracy costs at least 4x more, inflated by the log factor
    # (which is steep near the accuracy ceiling and settles toward 1)
    ratios = [b / a for a, b in zip(budgets, budgets[1:])]
    assert all(4.0 <= r <= 30.0 for r in ratios)
    assert ratios == sorted(ratios, reverse=True)


def test_determinism_same_seed_same_run():
    problem = generate("piecewise_linear_max", 2, 57, {"pieces": 4, "noise": 0.2})
    a = gr_convex(np.zeros(2), 1.0, 0.3, 80, problem, seeded_stream(11))
    b = gr_convex(np.zeros(2), 1.0, 0.3, 80, problem, seeded_stream(11))
    c = gr_convex(np.zeros(2), 1.0, 0.3, 80, problem, seeded_stream(12))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_trace_checkpoints_are_running_averages():
    problem = generate("l1_regression", 2, 58, {"rows": 5})
    trace = RunTrace()
    T = 33
    out = pssm_sc(PssmConfig(np.zeros(2), 1.0, T), problem.oracle, problem.set,
                  seeded_stream(13), trace=trace, checkpoints=[1, 2, 4, 8, 16, 32])
    assert trace.total_calls == T - 1
    assert [c for c, _ in trace.rows] == [1, 2, 4, 8, 16, 32]
    assert np.array_equal(trace.rows[-1][1], out)
