import numpy as np
import pytest

from gradreg import (
    Ball,
    PreconditionError,
    SubgradientOracle,
    generate,
    replicate_stream,
    seeded_stream,
    shift_oracle,
)
from gradreg.problems import exact_mean_subgradient


def test_seeded_stream_determinism():
    a = seeded_stream(7).standard_normal(16)
    b = seeded_stream(7).standard_normal(16)
    c = seeded_stream(8).standard_normal(16)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_replicate_streams_independent():
    a = replicate_stream(5, 0).standard_normal(8)
    b = replicate_stream(5, 1).standard_normal(8)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, replicate_stream(5, 0).standard_normal(8))


def _zero_oracle(dim):
    return SubgradientOracle(
        lambda x, rng: np.zeros(dim), lipschitz=0.0, diameter=2.0
    )


def test_shift_zero_at_center():
    oracle = _zero_oracle(2).shifted(1.0, np.array([0.3, -0.2]))
    g = oracle.sample(np.array([0.3, -0.2]), seeded_stream(0))
    assert np.allclose(g, 0.0)


def test_pure_quadratic_shift():
    oracle = shift_oracle(_zero_oracle(2), 2.0, np.zeros(2))
    g = oracle.sample(np.array([1.0, 1.0]), seeded_stream(0))
    assert np.allclose(g, [2.0, 2.0])


def test_shift_requires_positive_weight():
    with pytest.raises(PreconditionError):
        _zero_oracle(2).shifted(0.0, np.zeros(2))


def test_shift_composition_matches_single_oracle():
    problem = generate("l1_regression", 3, 3, {"rows": 6})
    base = problem.oracle
    c1, c2 = np.array([0.2, 0.0, -0.1]), np.array([0.0, 0.5, 0.0])
    twice = base.shifted(0.5, c1).shifted(1.5, c2)
    x = np.array([0.1, -0.4, 0.2])
    g1 = twice.sample(x, seeded_stream(11))
    g2 = base.sample(x, seeded_stream(11)) + 0.5 * (x - c1) + 1.5 * (x - c2)
    assert np.allclose(g1, g2, atol=1e-15)
    want = np.sqrt(2.0 * (base.lipschitz**2 + (problem.diameter * 2.0) ** 2))
    assert np.isclose(twice.second_moment_bound, want, rtol=1e-14)
    assert np.isclose(twice.total_shift_weight, 2.0)


def test_shifted_oracle_mean_is_shifted_subgradient():
    # empirical mean of shifted draws matches the exact subgradient of
    # g(x) + mu/2 ||x - c||^2 within Monte Carlo error
    problem = generate("l1_regression", 2, 9, {"rows": 5})
    mu, center = 0.8, np.array([0.3, -0.3])
    shifted = problem.oracle.shifted(mu, center)
    x = np.array([0.25, 0.4])
    rng = seeded_stream(123)
    draws = np.stack([shifted.sample(x, rng) for _ in range(40_000)])
    want = exact_mean_subgradient(problem, x) + mu * (x - center)
    se = draws.std(axis=0, ddof=1) / np.sqrt(draws.shape[0])
    assert np.all(np.abs(draws.mean(axis=0) - want) <= 3.0 * se + 1e-12)


def test_second_moment_bound_inflates_with_shifts():
    problem = generate("piecewise_linear_max", 2, 4, {"pieces": 3, "noise": 0.1})
    base = problem.oracle
    assert base.second_moment_bound == base.lipschitz
    shifted = base.shifted(1.0, np.zeros(2))
    assert shifted.second_moment_bound > base.lipschitz
