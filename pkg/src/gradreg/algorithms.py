"""Solvers: weighted-average subgradient descent and gradual regularization.

All solvers consume only the stochastic oracle and the projection; they
never evaluate the objective.  A run is strictly sequential and owns its
random stream.  Oracle-call accounting: one inner solve of length ``T``
makes ``T - 1`` draws (steps stop one short of the number of averaged
points), so the outer loop costs ``(rounds + 1) * (T - 1)`` draws total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConfigurationError, PreconditionError
from .oracles import SubgradientOracle
from .problem import ProblemInstance
from .sets import ConstraintSet, as_point


def pssm_oracle_calls(T: int) -> int:
    """Oracle draws consumed by one weighted-average subgradient run."""
    return T - 1


def gr_oracle_calls(T: int, rounds: int) -> int:
    """Oracle draws consumed by the full gradual-regularization loop."""
    return (rounds + 1) * (T - 1)


def default_checkpoints(total_calls: int) -> list[int]:
    """Powers of two up to ``total_calls``, plus the final call count."""
    points = []
    c = 1
    while c < total_calls:
        points.append(c)
        c *= 2
    if total_calls >= 1:
        points.append(total_calls)
    return points


@dataclass
class RunTrace:
    """Candidate outputs captured at increasing oracle-call counts."""

    rows: list[tuple[int, np.ndarray]] = field(default_factory=list)
    total_calls: int = 0

    def add(self, calls: int, point: np.ndarray) -> None:
        if self.rows and calls == self.rows[-1][0]:
            self.rows[-1] = (calls, np.asarray(point, dtype=float).copy())
            return
        if self.rows and calls < self.rows[-1][0]:
            raise ConfigurationError("trace oracle-call counts must increase")
        self.rows.append((int(calls), np.asarray(point, dtype=float).copy()))


@dataclass(frozen=True)
class PssmConfig:
    """Inner solver configuration: start point, curvature, iteration count."""

    x0: np.ndarray
    mu: float
    T: int

    def __post_init__(self):
        object.__setattr__(self, "x0", as_point(self.x0))
        if not self.mu > 0:
            raise ConfigurationError("strong convexity constant must be positive")
        if not (isinstance(self.T, (int, np.integer)) and self.T >= 1):
            raise ConfigurationError("iteration count must be an integer >= 1")


def _family_args(oracle: SubgradientOracle):
    kd = oracle.kernel_data
    if kd is None:
        return None
    if kd[0] == "plmax":
        family, mat, off, sigma = kernels.FAM_PLMAX, kd[1], kd[2], float(kd[3])
    elif kd[0] == "l1_rows":
        family, mat, off, sigma = kernels.FAM_L1, kd[1], kd[2], 0.0
    else:
        return None
    weight, vec = oracle.shift_aggregate()
    if vec is None:
        vec = np.zeros(mat.shape[1])
    return family, mat, off, sigma, float(weight), vec


def _checkpoint_array(checkpoints, limit: int) -> np.ndarray:
    arr = np.asarray(sorted(set(int(c) for c in checkpoints if 1 <= int(c) <= limit)), dtype=np.int64)
    return arr


def pssm_sc(
    config: PssmConfig,
    oracle: SubgradientOracle,
    set_: ConstraintSet,
    stream: np.random.Generator,
    trace: RunTrace | None = None,
    checkpoints=(),
) -> np.ndarray:
    """Projected stochastic subgradient method for strongly convex objectives.

    Steps ``x_{t+1} = proj(x_t - 2 / (mu (t+1)) * sample)`` for
    ``t = 0 .. T-2`` and returns the average of ``x_0 .. x_{T-1}`` with
    weights ``t + 1``.  The caller guarantees the oracle's effective
    objective is ``mu``-strongly convex on the set.
    """
    x0 = as_point(config.x0, set_.dim)
    if not set_.contains(x0, 1e-9):
        raise PreconditionError("start point lies outside the constraint set")
    T = int(config.T)
    calls = pssm_oracle_calls(T)
    chk = _checkpoint_array(checkpoints, calls)
    fam = _family_args(oracle)
    if fam is not None:
        family, mat, off, sigma, shift_w, shift_vec = fam
        kind, sp0, sp1 = set_.kernel_spec()
        xbar, captured = kernels.pssm_loop(
            stream, x0, float(config.mu), T, family, mat, off, sigma,
            shift_w, shift_vec, kind, sp0, sp1, chk,
        )
    else:
        xbar, captured = _pssm_python(stream, x0, float(config.mu), T, oracle, set_, chk)
    if trace is not None:
        base = trace.total_calls
        for c, point in zip(chk, captured):
            trace.add(base + int(c), point)
        trace.total_calls = base + calls
    return xbar


def _pssm_python(stream, x0, mu, T, oracle, set_, chk):
    # reference loop; mirrors the compiled kernel operation for operation so
    # both paths produce bit-identical runs for the shipped families
    kind, sp0, sp1 = set_.kernel_spec()
    x = x0.copy()
    s = x.copy()
    captured = np.empty((chk.shape[0], x0.shape[0]))
    ci = 0
    for t in range(T - 1):
        g = oracle.sample(x, stream)
        step = 2.0 / (mu * (t + 1.0))
        x = kernels._project(kind, sp0, sp1, x - step * g)
        s = s + (t + 2.0) * x
        if ci < chk.shape[0] and t + 1 == chk[ci]:
            captured[ci] = (2.0 / ((t + 2.0) * (t + 3.0))) * s
            ci += 1
    return (2.0 / (T * (T + 1.0))) * s, captured


def baseline_psgd(
    x0,
    step_scale: float,
    T: int,
    oracle: SubgradientOracle,
    set_: ConstraintSet,
    stream: np.random.Generator,
    trace: RunTrace | None = None,
    checkpoints=(),
) -> np.ndarray:
    """Plain projected stochastic subgradient with step ``c / sqrt(t+1)``.

    Returns the uniform average of ``x_0 .. x_{T-1}``; comparison baseline
    only.
    """
    x0 = as_point(x0, set_.dim)
    if not set_.contains(x0, 1e-9):
        raise PreconditionError("start point lies outside the constraint set")
    if not step_scale > 0:
        raise ConfigurationError("step scale must be positive")
    T = int(T)
    if T < 1:
        raise ConfigurationError("iteration count must be >= 1")
    calls = T - 1
    chk = _checkpoint_array(checkpoints, calls)
    fam = _family_args(oracle)
    if fam is not None:
        family, mat, off, sigma, shift_w, shift_vec = fam
        kind, sp0, sp1 = set_.kernel_spec()
        xbar, captured = kernels.psgd_loop(
            stream, x0, float(step_scale), T, family, mat, off, sigma,
            shift_w, shift_vec, kind, sp0, sp1, chk,
        )
    else:
        kind, sp0, sp1 = set_.kernel_spec()
        x = x0.copy()
        s = x.copy()
        captured = np.empty((chk.shape[0], x0.shape[0]))
        ci = 0
        for t in range(T - 1):
            g = oracle.sample(x, stream)
            x = kernels._project(kind, sp0, sp1, x - (step_scale / np.sqrt(t + 1.0)) * g)
            s = s + x
            if ci < chk.shape[0] and t + 1 == chk[ci]:
                captured[ci] = s / (t + 2.0)
                ci += 1
        xbar = s / float(T)
    if trace is not None:
        base = trace.total_calls
        for c, point in zip(chk, captured):
            trace.add(base + int(c), point)
        trace.total_calls = base + calls
    return xbar


@dataclass
class RegularizationSchedule:
    """Doubling sequence of quadratic weights accumulated by the outer loop.

    ``mus[i]`` is the weight added after inner round ``i`` (so
    ``mus[0] = 2 mu0``), ``centers`` holds the successive inner solutions
    (one more than ``mus``), and ``partial_sums[i]`` is the total added
    weight after ``i`` rounds.
    """

    mu0: float
    mus: list[float] = field(default_factory=list)
    centers: list[np.ndarray] = field(default_factory=list)

    @property
    def partial_sums(self) -> list[float]:
        sums = [0.0]
        for m in self.mus:
            sums.append(sums[-1] + m)
        return sums

    @property
    def total_added(self) -> float:
        return self.partial_sums[-1]

    def push_weight(self, mu_next: float) -> None:
        """Append the next doubling weight, enforcing the ratio bound."""
        i = len(self.mus) + 1  # index of the weight being added
        expected = self.mu0 * 2.0**i
        if not math.isclose(mu_next, expected, rel_tol=1e-12):
            raise ConfigurationError(
                f"schedule weight {mu_next} breaks doubling (expected {expected})"
            )
        prior = self.partial_sums[-1]
        ratio = mu_next / (self.mu0 + prior)
        if ratio > 2.0 + 1e-12:
            raise ConfigurationError(f"schedule ratio bound violated: {ratio} > 2")
        self.mus.append(float(mu_next))

    def inner_strength(self, round_index: int) -> float:
        """Strong-convexity constant seen by inner solve ``round_index``."""
        return self.mu0 + self.partial_sums[round_index]

    def validate(self) -> None:
        sums = self.partial_sums
        for i, m in enumerate(self.mus):
            if not math.isclose(m, self.mu0 * 2.0 ** (i + 1), rel_tol=1e-12):
                raise ConfigurationError("schedule weights deviate from doubling")
            ratio = m / (self.mu0 + sums[i])
            if ratio > 2.0 + 1e-12:
                raise ConfigurationError("schedule ratio bound violated")
        closed_form = 2.0 * self.mu0 * (2.0 ** len(self.mus) - 1.0)
        if not math.isclose(sums[-1], closed_form, rel_tol=1e-12, abs_tol=1e-300):
            raise ConfigurationError("schedule partial sums deviate from closed form")
        if len(self.centers) not in (0, len(self.mus) + 1):
            raise ConfigurationError("schedule centers out of step with weights")


def gr_sc(
    x_init,
    mu: float,
    lam: float,
    T: int,
    rounds: int,
    oracle: SubgradientOracle,
    set_: ConstraintSet,
    stream: np.random.Generator,
    trace: RunTrace | None = None,
) -> np.ndarray:
    """Gradual regularization for strongly convex objectives.

    Runs ``rounds + 1`` inner solves; after inner round ``i`` the oracle
    gains the quadratic term ``mu * 2^{i+1} * (x - center_i)`` so the next
    solve sees a more strongly convex objective.  Returns the average of the
    inner solutions weighted by their quadratic weights, with ``lam`` on the
    last one.  The quadratic weight of the final pass is never used and is
    not constructed.
    """
    if not mu > 0:
        raise ConfigurationError("base strong convexity must be positive")
    if not lam > 0:
        raise ConfigurationError("averaging parameter must be positive")
    if rounds < 0:
        raise ConfigurationError("round count must be nonnegative")
    center = as_point(x_init, set_.dim)
    if not set_.contains(center, 1e-9):
        raise PreconditionError("start point lies outside the constraint set")
    schedule = RegularizationSchedule(mu0=float(mu))
    current = oracle
    for i in range(rounds + 1):
        cfg = PssmConfig(center, schedule.inner_strength(i), int(T))
        xhat = pssm_sc(cfg, current, set_, stream, trace=trace)
        schedule.centers.append(xhat)
        if trace is not None:
            trace.add(trace.total_calls, xhat)
        if i < rounds:
            mu_next = mu * 2.0 ** (i + 1)
            schedule.push_weight(mu_next)
            current = current.shifted(mu_next, xhat)
            center = xhat
    schedule.validate()
    total_added = schedule.total_added
    total_weight = lam + total_added
    acc = lam * schedule.centers[-1]
    for mu_i, xh in zip(schedule.mus, schedule.centers[:-1]):
        acc = acc + mu_i * xh
    xbar = acc / total_weight
    if trace is not None:
        trace.add(trace.total_calls, xbar)
    return xbar


def _ceil_with_slack(v: float) -> int:
    return int(math.ceil(v - 1e-12))


def rounds_to_match_weight(mu: float, lam: float) -> int:
    """Round count that makes the added weight match the averaging parameter."""
    if not (mu > 0 and lam > 0):
        raise PreconditionError("parameters must be positive")
    return max(0, _ceil_with_slack(math.log2(1.0 + lam / (2.0 * mu))))


def regularization_params(rho: float, epsilon: float, diameter: float):
    """Quadratic weight, averaging parameter and round count for a target accuracy.

    Requires ``0 < epsilon <= 2 rho diameter``.  Non-integer round counts are
    rounded up, which only adds regularization weight beyond the averaging
    parameter; callers can report the realized total alongside.
    """
    if not diameter > 0:
        raise ConfigurationError("diameter must be positive")
    if not rho > 0:
        raise ConfigurationError("envelope scale rho must be positive")
    if not 0 < epsilon <= 2.0 * rho * diameter:
        raise PreconditionError(
            f"target accuracy must satisfy 0 < epsilon <= 2 rho D = {2.0 * rho * diameter:g}"
        )
    mu = epsilon / (2.0 * diameter)
    lam = 2.0 * rho - mu
    rounds = max(0, _ceil_with_slack(math.log2(0.75 + rho * diameter / epsilon)))
    return mu, lam, rounds


def worst_case_budget(rho: float, epsilon: float, lipschitz: float, diameter: float) -> int:
    """Smallest per-round iteration count guaranteeing mean envelope-gradient
    norm at most ``epsilon`` under the worst-case constants.

    Solves ``28 sqrt(2) log2(3/4 + rho D / eps) sqrt(2 L^2 + 3 rho^2 D^2)
    / sqrt(T+1) <= eps / 2`` for ``T``.
    """
    if not 0 < epsilon <= 2.0 * rho * diameter:
        raise PreconditionError("target accuracy must satisfy 0 < epsilon <= 2 rho D")
    log_term = math.log2(0.75 + rho * diameter / epsilon)
    coeff = 28.0 * math.sqrt(2.0) * log_term
    rhs = (2.0 / epsilon) ** 2 * coeff * coeff * (2.0 * lipschitz**2 + 3.0 * rho**2 * diameter**2)
    return max(1, _ceil_with_slack(rhs) - 1)


def gr_convex(
    x_center,
    rho: float,
    epsilon: float,
    T: int,
    problem: ProblemInstance,
    stream: np.random.Generator,
    trace: RunTrace | None = None,
) -> np.ndarray:
    """Gradual regularization for general convex objectives.

    Adds the quadratic ``mu/2 ||x - x_center||^2`` with ``mu = eps / (2 D)``
    to make the objective strongly convex, runs the strongly convex loop
    with averaging parameter ``lam / 2``, and returns the convex combination
    ``(mu x_center + lam xbar) / (mu + lam)``.  The reported envelope scale
    satisfies ``mu + lam = 2 rho`` exactly.
    """
    x_c = problem.check_point(x_center)
    if not problem.set.contains(x_c, 1e-9):
        raise PreconditionError("center point lies outside the constraint set")
    mu, lam, rounds = regularization_params(rho, epsilon, problem.diameter)
    if not math.isclose(mu + lam, 2.0 * rho, rel_tol=1e-12):
        raise ConfigurationError("regularization parameters lost the 2 rho identity")
    shifted = problem.oracle.shifted(mu, x_c)
    xbar = gr_sc(x_c, mu, lam / 2.0, int(T), rounds, shifted, problem.set, stream, trace=trace)
    zbar = (mu * x_c + lam * xbar) / (mu + lam)
    if not problem.set.contains(zbar, 1e-7 * (1.0 + problem.diameter)):
        raise ConfigurationError("returned point drifted outside the constraint set")
    if trace is not None:
        trace.add(trace.total_calls, zbar)
    return zbar


@dataclass
class ConvergenceRecord:
    """Per-checkpoint trail of one solver run.

    Rows are ``(oracle_calls, iterate, envelope_grad_norm, function_gap)``
    with strictly increasing call counts; gradient norms and gaps are filled
    by the harness where measurable.
    """

    rows: list[tuple[int, np.ndarray, float | None, float | None]]
    config_echo: dict
    seed: int

    def validate(self) -> None:
        calls = [r[0] for r in self.rows]
        if any(b <= a for a, b in zip(calls, calls[1:])):
            raise ConfigurationError("oracle-call counts must strictly increase")
