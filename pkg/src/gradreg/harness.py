"""Experiment runner: config files, Monte Carlo replication, CSV output.

The pipeline is a pure function of the config file and the base seed:
replicate streams are hashed from ``(seed, replicate)``, workers own their
streams, and results are merged in replicate order, so output bytes do not
depend on the thread count.

CSV schemas (fixed column order, floats printed with 17 significant digits):

* records: ``experiment_id, replicate, oracle_calls, grad_norm,
  function_gap, seed``
* summary: ``experiment_id, budget, mean_grad_norm, std_error,
  mean_function_gap``
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np
import yaml

from .algorithms import (
    ConvergenceRecord,
    PssmConfig,
    RunTrace,
    baseline_psgd,
    default_checkpoints,
    gr_convex,
    gr_sc,
    pssm_sc,
    regularization_params,
)
from .envelope import envelope_gradient
from .errors import ConfigurationError
from .oracles import child_stream
from .problem import ProblemInstance
from .problems import generate, instance_to_dict
from .sets import Ball, Box, Simplex

RECORD_COLUMNS = ("experiment_id", "replicate", "oracle_calls", "grad_norm", "function_gap", "seed")
SUMMARY_COLUMNS = ("experiment_id", "budget", "mean_grad_norm", "std_error", "mean_function_gap")
SCHEMA_VERSION = 1

ALGORITHM_KINDS = ("pssm_sc", "gr_sc", "gr_convex", "baseline_psgd")

_ALGO_KEYS = {
    "pssm_sc": {"mu", "T", "x0"},
    "gr_sc": {"mu", "lam", "T", "rounds", "x0"},
    "gr_convex": {"rho", "epsilon", "epsilon_coeff", "T", "budget", "x0"},
    "baseline_psgd": {"step_scale", "T", "budget", "x0"},
}


@dataclass(frozen=True)
class ProblemSpec:
    kind: str
    dimension: int
    seed: int
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class AlgorithmSpec:
    kind: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description; round-trips losslessly through YAML."""

    experiment_id: str
    seed: int
    replicates: int
    problem: ProblemSpec
    algorithm: AlgorithmSpec
    checkpoints: str = "pow2"
    measure_lambda: float | None = None
    measure_tol: float = 1e-8

    def __post_init__(self):
        if self.algorithm.kind not in ALGORITHM_KINDS:
            raise ConfigurationError(f"unknown algorithm kind {self.algorithm.kind!r}")
        extra = set(self.algorithm.params) - _ALGO_KEYS[self.algorithm.kind]
        if extra:
            raise ConfigurationError(
                f"unknown algorithm params for {self.algorithm.kind}: {sorted(extra)}"
            )
        if self.replicates < 1:
            raise ConfigurationError("replicates must be >= 1")
        if self.checkpoints not in ("pow2", "final"):
            raise ConfigurationError("checkpoints policy must be 'pow2' or 'final'")
        if not self.measure_tol > 0:
            raise ConfigurationError("measure tol must be positive")


def config_to_dict(config: ExperimentConfig) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "experiment_id": config.experiment_id,
        "seed": config.seed,
        "replicates": config.replicates,
        "problem": asdict(config.problem),
        "algorithm": asdict(config.algorithm),
        "checkpoints": config.checkpoints,
        "measure": {"lambda": config.measure_lambda, "tol": config.measure_tol},
    }


def config_from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigurationError("config must be a mapping")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigurationError(f"unsupported config schema_version {version!r}")
    allowed = {"schema_version", "experiment_id", "seed", "replicates", "problem",
               "algorithm", "checkpoints", "measure"}
    extra = set(data) - allowed
    if extra:
        raise ConfigurationError(f"unknown config keys: {sorted(extra)}")
    for key in ("experiment_id", "seed", "replicates", "problem", "algorithm"):
        if key not in data:
            raise ConfigurationError(f"config missing required key {key!r}")
    prob = data["problem"]
    if not isinstance(prob, dict):
        raise ConfigurationError("problem section must be a mapping")
    extra = set(prob) - {"kind", "dimension", "seed", "params"}
    if extra:
        raise ConfigurationError(f"unknown problem keys: {sorted(extra)}")
    algo = data["algorithm"]
    if not isinstance(algo, dict):
        raise ConfigurationError("algorithm section must be a mapping")
    extra = set(algo) - {"kind", "params"}
    if extra:
        raise ConfigurationError(f"unknown algorithm keys: {sorted(extra)}")
    measure = data.get("measure", {}) or {}
    extra = set(measure) - {"lambda", "tol"}
    if extra:
        raise ConfigurationError(f"unknown measure keys: {sorted(extra)}")
    lam = measure.get("lambda")
    return ExperimentConfig(
        experiment_id=str(data["experiment_id"]),
        seed=int(data["seed"]),
        replicates=int(data["replicates"]),
        problem=ProblemSpec(
            kind=str(prob.get("kind")),
            dimension=int(prob.get("dimension", 1)),
            seed=int(prob.get("seed", 0)),
            params=dict(prob.get("params") or {}),
        ),
        algorithm=AlgorithmSpec(kind=str(algo.get("kind")), params=dict(algo.get("params") or {})),
        checkpoints=str(data.get("checkpoints", "pow2")),
        measure_lambda=None if lam is None else float(lam),
        measure_tol=float(measure.get("tol", 1e-8)),
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(data)


def save_config(config: ExperimentConfig, path: str) -> None:
    _write_text(path, yaml.safe_dump(config_to_dict(config), sort_keys=False))


def _write_text(path: str, text: str) -> None:
    try:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigurationError(f"cannot write {path}: {exc}") from exc


def start_point(problem: ProblemInstance) -> np.ndarray:
    """Deterministic feasible start: center / midpoint / uniform weights."""
    set_ = problem.set
    if isinstance(set_, Ball):
        return set_.center.copy()
    if isinstance(set_, Box):
        return 0.5 * (set_.lower + set_.upper)
    if isinstance(set_, Simplex):
        return np.full(set_.dim, set_.scale / set_.dim)
    raise ConfigurationError(f"no default start point for {type(set_).__name__}")


@dataclass(frozen=True)
class ResolvedRun:
    """Algorithm closure with realized call count and measurement default."""

    runner: object
    total_calls: int
    measure_lambda: float | None


def resolve_run(problem: ProblemInstance, spec: AlgorithmSpec, budget: int | None = None) -> ResolvedRun:
    """Bind algorithm parameters to the instance, deriving T from a budget.

    Budgets count total oracle draws; per-round iteration counts are derived
    so the realized total never exceeds the requested budget.
    """
    params = dict(spec.params)
    x0 = np.asarray(params.pop("x0"), dtype=float) if "x0" in params else start_point(problem)
    kind = spec.kind

    if kind == "pssm_sc":
        mu = float(params["mu"])
        T = int(budget) + 1 if budget is not None else int(params["T"])
        cfg = PssmConfig(x0, mu, T)

        def runner(stream, trace, checkpoints):
            return pssm_sc(cfg, problem.oracle, problem.set, stream, trace=trace, checkpoints=checkpoints)

        return ResolvedRun(runner, T - 1, None)

    if kind == "baseline_psgd":
        default_step = problem.diameter / max(problem.lipschitz, 1e-12)
        step_scale = float(params.get("step_scale", default_step))
        T = int(budget) + 1 if budget is not None else int(params["T"])

        def runner(stream, trace, checkpoints):
            return baseline_psgd(x0, step_scale, T, problem.oracle, problem.set, stream,
                                 trace=trace, checkpoints=checkpoints)

        return ResolvedRun(runner, T - 1, None)

    if kind == "gr_sc":
        mu = float(params["mu"])
        lam = float(params["lam"])
        rounds = int(params["rounds"])
        if budget is not None:
            T = max(2, int(budget) // (rounds + 1) + 1)
        else:
            T = int(params["T"])

        def runner(stream, trace, checkpoints):
            return gr_sc(x0, mu, lam, T, rounds, problem.oracle, problem.set, stream, trace=trace)

        return ResolvedRun(runner, (rounds + 1) * (T - 1), 1.0 / (2.0 * lam))

    rho = float(params["rho"])
    if "epsilon" in params:
        epsilon = float(params["epsilon"])
    elif "epsilon_coeff" in params:
        # couple the target accuracy to the call budget, mirroring how the
        # worst-case budget is chosen for a target: eps ~ sqrt(scale / budget)
        ref_budget = budget if budget is not None else params.get("budget")
        if ref_budget is None:
            raise ConfigurationError("epsilon_coeff needs a call budget")
        scale = math.sqrt(2.0 * problem.lipschitz**2 + 3.0 * (rho * problem.diameter) ** 2)
        epsilon = min(
            2.0 * rho * problem.diameter * (1.0 - 1e-9),
            float(params["epsilon_coeff"]) * scale / math.sqrt(float(ref_budget)),
        )
    else:
        raise ConfigurationError("gr_convex needs epsilon or epsilon_coeff")
    _, _, rounds = regularization_params(rho, epsilon, problem.diameter)
    if budget is not None:
        T = max(2, int(budget) // (rounds + 1) + 1)
    elif "T" in params:
        T = int(params["T"])
    elif "budget" in params:
        T = max(2, int(params["budget"]) // (rounds + 1) + 1)
    else:
        raise ConfigurationError("gr_convex needs either T or budget")

    def runner(stream, trace, checkpoints):
        return gr_convex(x0, rho, epsilon, T, problem, stream, trace=trace)

    return ResolvedRun(runner, (rounds + 1) * (T - 1), 1.0 / (2.0 * rho))


def _fmt(value) -> str:
    if value is None:
        return ""
    return f"{value:.17g}"


@dataclass
class ExperimentResult:
    experiment_id: str
    records: list[ConvergenceRecord]
    record_lines: list[str]
    summary_row: tuple

    @property
    def final_grad_norms(self) -> np.ndarray:
        vals = [rec.rows[-1][2] for rec in self.records]
        return np.array([v for v in vals if v is not None], dtype=float)

    @property
    def final_gaps(self) -> np.ndarray:
        vals = [rec.rows[-1][3] for rec in self.records]
        return np.array([v for v in vals if v is not None], dtype=float)


def _run_replicate(problem, resolved, config, replicate, seed_keys):
    stream = child_stream(config.seed, *seed_keys, replicate)
    trace = RunTrace()
    checkpoints = default_checkpoints(resolved.total_calls) if config.checkpoints == "pow2" else ()
    final = resolved.runner(stream, trace, checkpoints)
    if not trace.rows or trace.rows[-1][0] != resolved.total_calls:
        trace.add(resolved.total_calls, final)
    rows = trace.rows if config.checkpoints == "pow2" else [trace.rows[-1]]
    lam = config.measure_lambda if config.measure_lambda is not None else resolved.measure_lambda
    out = []
    for calls, point in rows:
        if not problem.set.contains(point, 1e-7 * (1.0 + problem.diameter)):
            raise ConfigurationError(f"recorded iterate left the constraint set ({problem.name})")
        grad_norm = None
        if lam is not None:
            grad_norm = float(np.linalg.norm(envelope_gradient(problem, lam, point, config.measure_tol)))
        gap = None
        if problem.known_min is not None:
            gap = problem.value(point) - problem.known_min[1]
        out.append((calls, point, grad_norm, gap))
    return ConvergenceRecord(rows=out, config_echo=config_to_dict(config), seed=config.seed)


def run_experiment(
    config: ExperimentConfig,
    out_dir: str | None = None,
    threads: int = 1,
    budget: int | None = None,
    seed_keys: tuple = (),
    experiment_id: str | None = None,
) -> ExperimentResult:
    """Run all replicates of one experiment; optionally write CSV files.

    Preconditions (problem construction, algorithm parameter binding) are
    validated before the first replicate starts.
    """
    problem = generate(config.problem.kind, config.problem.dimension,
                       config.problem.seed, config.problem.params)
    resolved = resolve_run(problem, config.algorithm, budget=budget)
    exp_id = experiment_id or config.experiment_id

    def work(r):
        return _run_replicate(problem, resolved, config, r, seed_keys)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(work, range(config.replicates)))
    else:
        records = [work(r) for r in range(config.replicates)]

    lines = []
    for r, rec in enumerate(records):
        rec.validate()
        for calls, _point, grad_norm, gap in rec.rows:
            lines.append(
                f"{exp_id},{r},{calls},{_fmt(grad_norm)},{_fmt(gap)},{config.seed}"
            )
    finals = [rec.rows[-1] for rec in records]
    budgets = {calls for calls, *_ in finals}
    if len(budgets) != 1:
        raise ConfigurationError("replicates disagree on total oracle calls")
    total_calls = budgets.pop()
    grad_vals = np.array([row[2] for row in finals if row[2] is not None], dtype=float)
    gap_vals = np.array([row[3] for row in finals if row[3] is not None], dtype=float)
    mean_grad = float(grad_vals.mean()) if grad_vals.size else None
    std_err = (
        float(grad_vals.std(ddof=1) / math.sqrt(grad_vals.size)) if grad_vals.size > 1 else None
    )
    mean_gap = float(gap_vals.mean()) if gap_vals.size else None
    summary_row = (exp_id, total_calls, mean_grad, std_err, mean_gap)
    result = ExperimentResult(exp_id, records, lines, summary_row)

    if out_dir is not None:
        write_outputs(out_dir, [result], problem)
    return result


def records_csv(results: list[ExperimentResult]) -> str:
    lines = [",".join(RECORD_COLUMNS)]
    for res in results:
        lines.extend(res.record_lines)
    return "\n".join(lines) + "\n"


def summary_csv(results: list[ExperimentResult]) -> str:
    lines = [",".join(SUMMARY_COLUMNS)]
    for res in results:
        exp_id, budget, mean_grad, std_err, mean_gap = res.summary_row
        lines.append(f"{exp_id},{budget},{_fmt(mean_grad)},{_fmt(std_err)},{_fmt(mean_gap)}")
    return "\n".join(lines) + "\n"


def write_outputs(out_dir: str, results: list[ExperimentResult], problem=None) -> dict:
    paths = {
        "records": os.path.join(out_dir, "records.csv"),
        "summary": os.path.join(out_dir, "summary.csv"),
    }
    _write_text(paths["records"], records_csv(results))
    _write_text(paths["summary"], summary_csv(results))
    if problem is not None and problem.spec is not None:
        paths["instance"] = os.path.join(out_dir, "instance.yaml")
        _write_text(paths["instance"], yaml.safe_dump(instance_to_dict(problem), sort_keys=False))
    return paths


def sweep(
    config: ExperimentConfig,
    budgets,
    out_dir: str | None = None,
    threads: int = 1,
) -> list[ExperimentResult]:
    """Run the experiment at several total-oracle-call budgets."""
    budgets = [int(b) for b in budgets]
    if any(b < 1 for b in budgets):
        raise ConfigurationError("budgets must be positive")
    results = []
    for bi, budget in enumerate(budgets):
        results.append(
            run_experiment(
                config,
                out_dir=None,
                threads=threads,
                budget=budget,
                seed_keys=(bi,),
                experiment_id=f"{config.experiment_id}-b{budget}",
            )
        )
    if out_dir is not None:
        problem = generate(config.problem.kind, config.problem.dimension,
                           config.problem.seed, config.problem.params)
        write_outputs(out_dir, results, problem)
    return results


@dataclass(frozen=True)
class RateFit:
    """Least-squares fit of log(mean gradient norm) against log(oracle calls)."""

    slope: float
    intercept: float
    slope_se: float
    intercept_se: float
    slope_halfwidth: float
    n_points: int


def fit_rate(budgets, means) -> RateFit:
    """Fit a power law to (budget, mean norm) pairs.

    Requires at least 4 points spanning at least two decades of budgets.
    The half-width is a 95% confidence interval on the slope.
    """
    from scipy import stats

    x = np.log(np.asarray(budgets, dtype=float))
    y = np.log(np.asarray(means, dtype=float))
    if x.shape[0] < 4:
        raise ConfigurationError("rate fit needs at least 4 budget points")
    if np.max(x) - np.min(x) < math.log(100.0) - 1e-9:
        raise ConfigurationError("rate fit needs budgets spanning at least two decades")
    n = x.shape[0]
    xbar = x.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    slope = float(np.sum((x - xbar) * (y - y.mean())) / sxx)
    intercept = float(y.mean() - slope * xbar)
    resid = y - (intercept + slope * x)
    sigma2 = float(resid @ resid) / max(n - 2, 1)
    slope_se = math.sqrt(sigma2 / sxx)
    intercept_se = math.sqrt(sigma2 * (1.0 / n + xbar**2 / sxx))
    halfwidth = float(stats.t.ppf(0.975, max(n - 2, 1))) * slope_se
    return RateFit(slope, intercept, slope_se, intercept_se, halfwidth, n)


def fit_rate_from_summary(path: str) -> RateFit:
    budgets, means = [], []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            if tuple(header) != SUMMARY_COLUMNS:
                raise ConfigurationError(f"unexpected summary schema in {path}: {header}")
            for line in fh:
                parts = line.strip().split(",")
                if len(parts) != len(SUMMARY_COLUMNS) or not parts[2]:
                    continue
                budgets.append(float(parts[1]))
                means.append(float(parts[2]))
    except OSError as exc:
        raise ConfigurationError(f"cannot read summary {path}: {exc}") from exc
    return fit_rate(budgets, means)


def plot_summary(results: list[ExperimentResult], path: str) -> None:
    """Render mean gradient norm against budget as a log-log line chart."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    budgets = [res.summary_row[1] for res in results]
    means = [res.summary_row[2] for res in results]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(budgets, means, marker="o")
    ax.set_xlabel("oracle calls")
    ax.set_ylabel("mean envelope gradient norm")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    try:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        fig.savefig(path, dpi=120)
    except OSError as exc:
        raise ConfigurationError(f"cannot write plot {path}: {exc}") from exc
    finally:
        plt.close(fig)
