import numpy as np
import pytest

from gradreg import Box, l1_regression_instance


def grid_minimize_1d(fn, lo, hi, n=400_001):
    """Dense-grid argmin oracle for 1-D verification."""
    ts = np.linspace(lo, hi, n)
    vals = np.array([fn(t) for t in ts])
    i = int(np.argmin(vals))
    return float(ts[i]), float(vals[i])


@pytest.fixture
def abs_problem():
    """g(x) = |x| on the box [-10, 10], minimum 0 at 0."""
    return l1_regression_instance(
        np.array([[1.0]]),
        np.array([0.0]),
        Box([-10.0], [10.0]),
        known_min=(np.array([0.0]), 0.0),
        name="abs",
    )
