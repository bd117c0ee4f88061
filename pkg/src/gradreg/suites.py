"""Named verification suites behind the ``verify`` CLI command.

Each suite checks one batch of identities, oracle contracts or convergence
bounds at desk scale and reports per-assertion outcomes with measured
values.  Suites are deterministic: all randomness comes from fixed seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .algorithms import (
    PssmConfig,
    RegularizationSchedule,
    gr_sc,
    pssm_sc,
    regularization_params,
    rounds_to_match_weight,
    worst_case_budget,
)
from .envelope import (
    QuadraticPerturbation,
    complete_square,
    envelope_of_regularization,
    near_stationarity_witness,
    prox,
)
from .errors import ConfigurationError
from .harness import (
    AlgorithmSpec,
    ExperimentConfig,
    ProblemSpec,
    fit_rate,
    records_csv,
    run_experiment,
    summary_csv,
    sweep,
)
from .oracles import seeded_stream
from .problems import (
    exact_mean_subgradient,
    generate,
    l1_regression_instance,
    piecewise_linear_max_instance,
    strongly_convex_wrap,
)
from .sets import Ball, Box, Simplex


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: str
    bound: str


@dataclass
class SuiteReport:
    suite: str
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, measured, bound) -> None:
        self.checks.append(CheckResult(name, bool(passed), str(measured), str(bound)))

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            out.append(f"{status} {self.suite}/{c.name} measured={c.measured} bound={c.bound}")
        status = "PASS" if self.passed else "FAIL"
        out.append(f"{status} suite {self.suite} ({len(self.checks)} checks)")
        return out


# --------------------------------------------------------------------------
# projections

def suite_projections(pairs: int = 10_000) -> SuiteReport:
    rep = SuiteReport("projections")
    rng = seeded_stream(20240501)
    d = 7
    sets = [
        Ball(np.zeros(d), 1.3),
        Box(-np.ones(d), np.full(d, 2.0)),
        Simplex(d, 1.0),
    ]
    rep.add("ball-radial", np.allclose(Ball(np.zeros(2), 1.0).project([3.0, 0.0]), [1.0, 0.0]),
            "project((3,0))", "(1,0)")
    rep.add("box-clamp", np.allclose(Box([-1, -1], [1, 1]).project([0.5, 2.0]), [0.5, 1.0]),
            "project((.5,2))", "(.5,1)")
    simp = Simplex(2, 1.0)
    rep.add("simplex-feasible", np.allclose(simp.project([0.5, 0.5]), [0.5, 0.5]),
            "project((.5,.5))", "identity")
    rep.add("simplex-shift", np.allclose(simp.project([1.0, 1.0]), [0.5, 0.5]),
            "project((1,1))", "(.5,.5)")
    for set_ in sets:
        kind = type(set_).__name__.lower()
        worst_idem = 0.0
        worst_exp = 0.0
        worst_diam = 0.0
        for _ in range(pairs):
            x = rng.standard_normal(d) * 2.0
            y = rng.standard_normal(d) * 2.0
            px, py = set_.project(x), set_.project(y)
            worst_idem = max(worst_idem, float(np.linalg.norm(set_.project(px) - px)))
            worst_exp = max(
                worst_exp,
                float(np.linalg.norm(px - py)) - float(np.linalg.norm(x - y)),
            )
            a, b = set_.sample(rng), set_.sample(rng)
            worst_diam = max(worst_diam, float(np.linalg.norm(a - b)) - set_.diameter)
        rep.add(f"{kind}-idempotent", worst_idem <= 1e-10, f"{worst_idem:.3e}", "1e-10")
        rep.add(f"{kind}-nonexpansive", worst_exp <= 1e-10, f"{worst_exp:.3e}", "1e-10")
        rep.add(f"{kind}-diameter", worst_diam <= 1e-10, f"{worst_diam:.3e}", "1e-10")
    return rep


# --------------------------------------------------------------------------
# oracle contracts

def _shipped_instances():
    return [
        generate("l1_regression", 4, 11, {"rows": 9}),
        generate("l1_regression", 3, 12, {"rows": 6, "axis_aligned": True}),
        generate("piecewise_linear_max", 4, 13, {"pieces": 6, "noise": 0.3}),
        generate("piecewise_linear_max", 2, 14, {"pieces": 4, "noise": 0.2, "designed": True,
                                                 "set": {"kind": "ball", "center": [0.0, 0.0], "radius": 1.0}}),
        generate("strongly_convex", 2, 15, {
            "base": {"kind": "piecewise_linear_max", "dimension": 2, "seed": 16,
                     "params": {"pieces": 4, "noise": 0.2, "designed": True,
                                "set": {"kind": "ball", "center": [0.0, 0.0], "radius": 1.0}}},
            "mu": 1.0, "center": "minimizer"}),
    ]


def suite_oracles(samples: int = 100_000) -> SuiteReport:
    rep = SuiteReport("oracles")
    for dim, seed in ((3, 21), (5, 22)):
        problem = generate("l1_regression", dim, seed, {"rows": 4 * dim})
        kd = problem.oracle.kernel_data
        rng = seeded_stream(1000 + seed)
        worst = 0.0
        for _ in range(10):
            x = problem.set.sample(rng)
            mean, var, _ = kernels.l1_sample_stats(rng, kd[1], kd[2], x, samples)
            exact = exact_mean_subgradient(problem, x)
            se = np.sqrt(np.maximum(var, 0.0) / samples)
            excess = np.abs(mean - exact) - 3.0 * se - 1e-12
            worst = max(worst, float(excess.max()))
        rep.add(f"l1-unbiased-d{dim}", worst <= 0.0, f"{worst:.3e}", "<= 0 (3 SE margin)")
    for problem in _shipped_instances():
        rng = seeded_stream(777)
        n_draw = 4000
        worst = -np.inf
        for _ in range(5):
            x = problem.set.sample(rng)
            sq = np.empty(n_draw)
            for i in range(n_draw):
                g = problem.oracle.sample(x, rng)
                sq[i] = g @ g
            se = float(sq.std(ddof=1) / math.sqrt(n_draw))
            worst = max(worst, float(sq.mean()) - problem.lipschitz**2 * (1 + 1e-9) - 3 * se)
        rep.add(f"second-moment-{problem.name}", worst <= 0.0, f"{worst:.3e}", "<= 0 (3 SE margin)")
    # shift composition
    problem = generate("l1_regression", 3, 23, {"rows": 5})
    base = problem.oracle
    c1, c2 = np.array([0.1, -0.2, 0.3]), np.array([-0.5, 0.4, 0.0])
    twice = base.shifted(0.7, c1).shifted(1.1, c2)
    x = np.array([0.2, 0.1, -0.3])
    g_twice = twice.sample(x, seeded_stream(99))
    g_manual = base.sample(x, seeded_stream(99)) + 0.7 * (x - c1) + 1.1 * (x - c2)
    rep.add("shift-composes", np.allclose(g_twice, g_manual, atol=1e-14),
            f"{float(np.max(np.abs(g_twice - g_manual))):.3e}", "1e-14")
    want = math.sqrt(2.0 * (base.lipschitz**2 + (problem.diameter * 1.8) ** 2))
    rep.add("shift-bound", math.isclose(twice.second_moment_bound, want, rel_tol=1e-12),
            f"{twice.second_moment_bound:.6g}", f"{want:.6g}")
    return rep


# --------------------------------------------------------------------------
# quadratic recentering identity

def suite_recentering(instances: int = 1000) -> SuiteReport:
    rep = SuiteReport("recentering")
    rng = seeded_stream(31)
    worst = 0.0
    for _ in range(instances):
        d = int(rng.integers(1, 11))
        k = int(rng.integers(1, 6))
        terms = tuple(
            (float(0.1 + 2.0 * rng.random()), rng.standard_normal(d) * 3.0) for _ in range(k)
        )
        pert = QuadraticPerturbation(terms)
        y = rng.standard_normal(d) * 3.0
        direct = 0.0
        for a, z in terms:
            diff = y - z
            direct += 0.5 * a * float(diff @ diff)
        _, reconstructed = complete_square(pert, y)
        rel = abs(direct - reconstructed) / (1.0 + abs(direct))
        worst = max(worst, rel)
    rep.add("identity", worst <= 1e-10, f"{worst:.3e}", "1e-10")
    rep.add("count", True, f"{instances} instances", ">= 1000")
    return rep


# --------------------------------------------------------------------------
# envelope of a quadratic perturbation

def _separable_cases(rng, count):
    cases = []
    for _ in range(count):
        d = int(rng.integers(1, 4))
        rows = int(rng.integers(2, 7))
        mat = np.zeros((rows, d))
        cols = rng.integers(0, d, size=rows)
        for k in range(rows):
            mat[k, cols[k]] = (0.3 + rng.random()) * (1.0 if rng.random() < 0.5 else -1.0)
        b = rng.standard_normal(rows)
        set_ = Box(np.full(d, -4.0), np.full(d, 4.0))
        problem = l1_regression_instance(mat, b, set_, name=f"sep-d{d}")
        cases.append(problem)
    return cases


def suite_envelope_shift(instances: int = 100, tol: float = 1e-8, bound: float = 1e-5) -> SuiteReport:
    rep = SuiteReport("envelope_shift")
    rng = seeded_stream(47)
    worst = 0.0
    for problem in _separable_cases(rng, instances):
        d = problem.dim
        k = int(rng.integers(1, 4))
        pert = QuadraticPerturbation(
            tuple((float(0.2 + rng.random()), rng.standard_normal(d)) for _ in range(k))
        )
        modulus = float(0.3 + 2.5 * rng.random())
        x = rng.standard_normal(d)
        lhs, rhs = envelope_of_regularization(problem, pert, modulus, x, tol)
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    rep.add("identity", worst <= bound, f"{worst:.3e}", f"{bound:g}")

    # vanishing perturbation reduces to the plain envelope gradient
    problem = _separable_cases(seeded_stream(48), 1)[0]
    tiny = QuadraticPerturbation(((1e-12, np.zeros(problem.dim)),))
    x = np.full(problem.dim, 0.7)
    lhs, rhs = envelope_of_regularization(problem, tiny, 1.0, x, tol)
    grad = prox(problem, 1.0, x, tol).gradient
    dev = max(float(np.linalg.norm(lhs - grad)), float(np.linalg.norm(rhs - grad)))
    rep.add("vanishing-term", dev <= 1e-6, f"{dev:.3e}", "1e-6")

    # flat objective: both sides equal the closed-form combination
    flat = piecewise_linear_max_instance(
        np.zeros((1, 2)), np.zeros(1), 0.0, Box([-5.0, -5.0], [5.0, 5.0]), name="flat"
    )
    pert = QuadraticPerturbation(((1.0, np.array([1.0, 0.0])), (2.0, np.array([0.0, -1.0]))))
    x = np.array([0.5, 0.5])
    lhs, rhs = envelope_of_regularization(flat, pert, 1.5, x, tol)
    acc = np.zeros(2)
    for a, z in pert.terms:
        acc += a * (x - z)
    closed = 1.5 / (1.5 + pert.total_weight) * acc
    dev = max(float(np.linalg.norm(lhs - closed)), float(np.linalg.norm(rhs - closed)))
    rep.add("flat-objective", dev <= 1e-9, f"{dev:.3e}", "1e-9")
    return rep


# --------------------------------------------------------------------------
# envelope gradient vs finite differences

def _active_pattern(problem, lam, x, tol):
    y = prox(problem, lam, x, tol).prox_point
    pattern = []
    sep = problem.separable
    for c in range(problem.dim):
        hit = -1
        for i, r in enumerate(sep.roots[c]):
            if abs(y[c] - r) <= 1e-10:
                hit = i
                break
        lohit = y[c] <= problem.set.lower[c] + 1e-10
        hihit = y[c] >= problem.set.upper[c] - 1e-10
        pattern.append((hit, lohit, hihit))
    return tuple(pattern)


def suite_gradient_consistency(points: int = 50, h: float = 1e-5, bound: float = 1e-4) -> SuiteReport:
    rep = SuiteReport("gradient_consistency")
    rng = seeded_stream(53)
    cases = _separable_cases(rng, 12)
    tol = 1e-12
    checked = 0
    worst = 0.0
    attempts = 0
    while checked < points and attempts < points * 50:
        attempts += 1
        problem = cases[int(rng.integers(0, len(cases)))]
        lam = float(0.4 + 1.6 * rng.random())
        x = rng.standard_normal(problem.dim) * 1.5
        base_pat = _active_pattern(problem, lam, x, tol)
        stable = True
        fd = np.empty(problem.dim)
        for c in range(problem.dim):
            for sgn in (+1.0, -1.0):
                xs = x.copy()
                xs[c] += sgn * h
                if _active_pattern(problem, lam, xs, tol) != base_pat:
                    stable = False
                    break
            if not stable:
                break
            plus = x.copy()
            plus[c] += h
            minus = x.copy()
            minus[c] -= h
            fplus = prox(problem, lam, plus, tol).envelope_value
            fminus = prox(problem, lam, minus, tol).envelope_value
            fd[c] = (fplus - fminus) / (2.0 * h)
        if not stable:
            continue
        grad = prox(problem, lam, x, tol).gradient
        worst = max(worst, float(np.linalg.norm(grad - fd)))
        checked += 1
    rep.add("points", checked >= points, f"{checked}", f">= {points}")
    rep.add("fd-match", worst <= bound, f"{worst:.3e}", f"{bound:g}")
    return rep


# --------------------------------------------------------------------------
# near-stationarity witness

def _witness_cases(rng):
    cases = list(_separable_cases(rng, 6))
    for seed in (61, 62):
        d = int(rng.integers(2, 5))
        mat = seeded_stream(seed).standard_normal((6, d))
        off = seeded_stream(seed + 10).standard_normal(6) * 0.5
        cases.append(
            piecewise_linear_max_instance(mat, off, 0.0, Box(np.full(d, -3.0), np.full(d, 3.0)),
                                          name=f"plmax-wit-{seed}")
        )
        rows = seeded_stream(seed + 20).standard_normal((8, d))
        b = seeded_stream(seed + 30).standard_normal(8)
        cases.append(
            l1_regression_instance(rows, b, Box(np.full(d, -3.0), np.full(d, 3.0)),
                                   name=f"l1-wit-{seed}")
        )
    return cases


def suite_stationarity(points: int = 100, tol: float = 1e-6) -> SuiteReport:
    rep = SuiteReport("stationarity")
    rng = seeded_stream(59)
    cases = _witness_cases(rng)
    worst_step = 0.0
    worst_descent = 0.0
    worst_stat = 0.0
    done = 0
    for i in range(points):
        problem = cases[i % len(cases)]
        lam = float(0.4 + 1.2 * rng.random())
        x = problem.set.project(rng.standard_normal(problem.dim) * 1.2)
        wit = near_stationarity_witness(problem, lam, x, tol)
        worst_step = max(worst_step, abs(wit.step - lam * wit.gradient_norm))
        worst_descent = max(worst_descent, -wit.descent)
        if wit.stationarity is None:
            raise ConfigurationError("witness lost its subdifferential model")
        worst_stat = max(worst_stat, wit.stationarity - wit.gradient_norm)
        done += 1
    rep.add("points", done == points, f"{done}", f"{points}")
    rep.add("step-identity", worst_step <= tol, f"{worst_step:.3e}", f"{tol:g}")
    rep.add("descent", worst_descent <= tol, f"{worst_descent:.3e}", f"{tol:g}")
    rep.add("stationarity", worst_stat <= tol, f"{worst_stat:.3e}", f"{tol:g}")

    # fixed point of the proximal map at a designed minimizer
    designed = generate("piecewise_linear_max", 2, 71,
                        {"pieces": 4, "designed": True, "noise": 0.1,
                         "set": {"kind": "ball", "center": [0.0, 0.0], "radius": 1.0}})
    wit = near_stationarity_witness(designed, 0.8, designed.known_min[0], tol)
    fixedpoint = max(wit.step, abs(wit.descent), wit.stationarity or 0.0)
    rep.add("minimizer-fixed-point", fixedpoint <= 1e-6, f"{fixedpoint:.3e}", "1e-6")
    return rep


# --------------------------------------------------------------------------
# strongly convex gap bound

def suite_gap_bound(replicates: int = 500) -> SuiteReport:
    rep = SuiteReport("gap_bound")
    for dim, seed in ((2, 81), (10, 82)):
        base = generate(
            "piecewise_linear_max", dim, seed,
            {"pieces": dim + 2, "noise": 0.3, "designed": True,
             "set": {"kind": "ball", "center": [0.0] * dim, "radius": 1.0}},
        )
        mu_sc = 1.0
        problem = strongly_convex_wrap(base, mu_sc, base.known_min[0])
        L = problem.oracle.second_moment_bound
        x_star, v_star = problem.known_min
        x0 = problem.set.project(x_star + 0.5)
        for T in (10, 100, 1000):
            gaps = np.empty(replicates)
            for r in range(replicates):
                stream = np.random.default_rng(
                    np.random.SeedSequence(entropy=9000 + seed, spawn_key=(T, r))
                )
                xbar = pssm_sc(PssmConfig(x0, mu_sc, T), problem.oracle, problem.set, stream)
                gaps[r] = problem.value(xbar) - v_star
            mean = float(gaps.mean())
            se = float(gaps.std(ddof=1) / math.sqrt(replicates))
            bound = 2.0 * L * L / (mu_sc * (T + 1.0)) + 3.0 * se
            rep.add(f"d{dim}-T{T}", mean <= bound, f"mean gap {mean:.4e}",
                    f"{bound:.4e} (2L^2/(mu (T+1)) + 3 SE)")
    return rep


# --------------------------------------------------------------------------
# schedule identities

def suite_schedule() -> SuiteReport:
    rep = SuiteReport("schedule")
    sched = RegularizationSchedule(mu0=1.0)
    for i in range(3):
        sched.push_weight(1.0 * 2.0 ** (i + 1))
    sched.validate()
    rep.add("weights", sched.mus == [2.0, 4.0, 8.0], str(sched.mus), "[2, 4, 8]")
    rep.add("partial-sums", sched.partial_sums == [0.0, 2.0, 6.0, 14.0],
            str(sched.partial_sums), "[0, 2, 6, 14]")
    strengths = [sched.inner_strength(i) for i in range(4)]
    rep.add("inner-strengths", strengths == [1.0, 3.0, 7.0, 15.0], str(strengths), "[1, 3, 7, 15]")
    rounds = rounds_to_match_weight(1.0, 6.0)
    total = 2.0 * 1.0 * (2.0**rounds - 1.0)
    rep.add("match-averaging", rounds == 2 and total == 6.0,
            f"rounds={rounds}, added={total}", "rounds=2, added=lam=6")
    closed = 2.0 * 1.0 * (2.0 ** len(sched.mus) - 1.0)
    rep.add("closed-form", math.isclose(sched.total_added, closed, rel_tol=1e-15),
            f"{sched.total_added}", f"{closed}")
    ratios = [sched.mus[i] / (1.0 + sched.partial_sums[i]) for i in range(len(sched.mus))]
    rep.add("ratio-bound", max(ratios) <= 2.0 + 1e-12, f"{max(ratios)}", "<= 2")
    mu, lam, rounds3 = regularization_params(1.0, 2.0, 1.0)
    rep.add("accuracy-boundary", (mu, lam, rounds3) == (1.0, 1.0, 1), f"{(mu, lam, rounds3)}",
            "(1, 1, 1)")
    mu, lam, rounds3 = regularization_params(1.0, 0.25, 1.0)
    rep.add("accuracy-interior", math.isclose(mu, 0.125) and math.isclose(lam, 1.875) and rounds3 == 3,
            f"{(mu, lam, rounds3)}", "(0.125, 1.875, 3)")
    return rep


# --------------------------------------------------------------------------
# rate reproduction and baseline ordering

def _rate_configs(replicates: int):
    rho = 1.0
    problems = {
        "l1": ProblemSpec("l1_regression", 10, 101,
                          {"rows": 20, "set": {"kind": "ball", "center": [0.0] * 10, "radius": 1.0}}),
        "plmax": ProblemSpec("piecewise_linear_max", 10, 102,
                             {"pieces": 16, "noise": 0.25,
                              "set": {"kind": "ball", "center": [0.0] * 10, "radius": 1.0}}),
    }
    configs = {}
    for label, prob in problems.items():
        epsilon = 0.05 * rho * 2.0  # D = 2 for the unit ball
        configs[label] = {
            "gr": ExperimentConfig(
                experiment_id=f"rate-{label}-gr", seed=5000, replicates=replicates,
                problem=prob,
                algorithm=AlgorithmSpec("gr_convex", {"rho": rho, "epsilon": epsilon, "T": 100}),
                checkpoints="final", measure_tol=1e-6,
            ),
            "base": ExperimentConfig(
                experiment_id=f"rate-{label}-psgd", seed=5000, replicates=replicates,
                problem=prob,
                algorithm=AlgorithmSpec("baseline_psgd", {"T": 100}),
                checkpoints="final", measure_lambda=1.0 / (2.0 * rho), measure_tol=1e-6,
            ),
        }
    return configs


def suite_rate(replicates: int = 50, budgets=(100, 1000, 10_000, 100_000)) -> SuiteReport:
    rep = SuiteReport("rate")
    configs = _rate_configs(replicates)
    for label, pair in configs.items():
        gr_results = sweep(pair["gr"], budgets)
        base_results = sweep(pair["base"], budgets)
        xs = [res.summary_row[1] for res in gr_results]
        ys = [res.summary_row[2] for res in gr_results]
        fit = fit_rate(xs, ys)
        rep.add(f"{label}-slope", -0.65 <= fit.slope <= -0.35,
                f"{fit.slope:.3f} (se {fit.slope_se:.3f})", "[-0.65, -0.35]")
        drops = all(b < a * 1.05 for a, b in zip(ys, ys[1:]))
        rep.add(f"{label}-monotone", drops, str([f"{v:.3e}" for v in ys]), "decreasing within noise")
        for budget, gres, bres in zip(budgets, gr_results, base_results):
            if budget < 1000:
                continue
            gmean, bmean = gres.summary_row[2], bres.summary_row[2]
            rep.add(f"{label}-vs-baseline-b{budget}", gmean <= bmean,
                    f"gr {gmean:.3e} vs psgd {bmean:.3e}", "gr <= psgd")
    return rep


# --------------------------------------------------------------------------
# end-to-end accuracy at the worst-case budget

def suite_budget(replicates: int = 30) -> SuiteReport:
    rep = SuiteReport("budget")
    rho = 1.0
    prob = ProblemSpec(
        "piecewise_linear_max", 2, 103,
        {"pieces": 4, "noise": 0.2, "scale": 0.25, "designed": True,
         "set": {"kind": "ball", "center": [0.0, 0.0], "radius": 0.5}},
    )
    problem = generate(prob.kind, prob.dimension, prob.seed, prob.params)
    L, D = problem.lipschitz, problem.diameter
    for frac in (0.2, 0.1):
        epsilon = frac * rho * D
        T = worst_case_budget(rho, epsilon, L, D)
        config = ExperimentConfig(
            experiment_id=f"budget-eps{frac}", seed=6000, replicates=replicates,
            problem=prob,
            algorithm=AlgorithmSpec("gr_convex", {"rho": rho, "epsilon": epsilon, "T": T}),
            checkpoints="final", measure_tol=1e-6,
        )
        result = run_experiment(config)
        mean = result.summary_row[2]
        rep.add(f"eps-{frac}", mean <= epsilon,
                f"mean grad {mean:.4e} at T={T}", f"<= {epsilon:.4e}")
    return rep


# --------------------------------------------------------------------------
# determinism

def suite_determinism() -> SuiteReport:
    rep = SuiteReport("determinism")
    config = ExperimentConfig(
        experiment_id="det", seed=414, replicates=3,
        problem=ProblemSpec("piecewise_linear_max", 2, 7,
                            {"pieces": 4, "noise": 0.2,
                             "set": {"kind": "ball", "center": [0.0, 0.0], "radius": 1.0}}),
        algorithm=AlgorithmSpec("gr_convex", {"rho": 1.0, "epsilon": 0.2, "T": 300}),
        checkpoints="pow2",
    )
    runs = [run_experiment(config, threads=t) for t in (1, 1, 2, 4)]
    texts = [records_csv([r]) + summary_csv([r]) for r in runs]
    rep.add("identical-bytes", all(t == texts[0] for t in texts[1:]),
            f"{len(set(texts))} distinct outputs", "1")
    return rep


SUITES = {
    "projections": suite_projections,
    "oracles": suite_oracles,
    "recentering": suite_recentering,
    "envelope_shift": suite_envelope_shift,
    "gradient_consistency": suite_gradient_consistency,
    "stationarity": suite_stationarity,
    "gap_bound": suite_gap_bound,
    "schedule": suite_schedule,
    "rate": suite_rate,
    "budget": suite_budget,
    "determinism": suite_determinism,
}


def run_suite(name: str) -> SuiteReport:
    if name not in SUITES:
        raise ConfigurationError(f"unknown suite {name!r}; available: {', '.join(sorted(SUITES))}")
    return SUITES[name]()
