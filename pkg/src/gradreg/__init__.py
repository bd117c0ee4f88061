"""Nonsmooth convex stochastic optimization with envelope-gradient guarantees.

Solvers drive the gradient of the objective's Moreau envelope to zero by
combining a weighted-average projected subgradient method with gradually
doubled quadratic regularization, and a verification harness checks the
identities and convergence bounds behind them at desk scale.
"""

from .algorithms import (
    ConvergenceRecord,
    PssmConfig,
    RegularizationSchedule,
    RunTrace,
    baseline_psgd,
    gr_convex,
    gr_oracle_calls,
    gr_sc,
    pssm_oracle_calls,
    pssm_sc,
    regularization_params,
    rounds_to_match_weight,
    worst_case_budget,
)
from .envelope import (
    ProxResult,
    QuadraticPerturbation,
    WitnessResult,
    complete_square,
    envelope_gradient,
    envelope_of_regularization,
    near_stationarity_witness,
    prox,
)
from .errors import (
    ConfigurationError,
    DimensionMismatchError,
    GradRegError,
    PreconditionError,
    ProxToleranceError,
    UnsupportedInstanceError,
)
from .harness import (
    AlgorithmSpec,
    ExperimentConfig,
    ProblemSpec,
    RateFit,
    fit_rate,
    load_config,
    run_experiment,
    save_config,
    sweep,
)
from .oracles import SubgradientOracle, replicate_stream, seeded_stream, shift_oracle
from .problem import MaxAffineForm, ProblemInstance, SeparablePiecewiseLinear
from .problems import (
    generate,
    instance_from_dict,
    instance_to_dict,
    l1_regression_instance,
    piecewise_linear_max_instance,
    strongly_convex_wrap,
    true_min,
)
from .sets import Ball, Box, ConstraintSet, Simplex, project_simplex
from .stationarity import min_norm_subgradient
from .suites import SUITES, run_suite

__version__ = "0.1.0"

__all__ = [
    "AlgorithmSpec",
    "Ball",
    "Box",
    "ConfigurationError",
    "ConstraintSet",
    "ConvergenceRecord",
    "DimensionMismatchError",
    "ExperimentConfig",
    "GradRegError",
    "MaxAffineForm",
    "PreconditionError",
    "ProblemInstance",
    "ProblemSpec",
    "ProxResult",
    "ProxToleranceError",
    "PssmConfig",
    "QuadraticPerturbation",
    "RateFit",
    "RegularizationSchedule",
    "RunTrace",
    "SeparablePiecewiseLinear",
    "Simplex",
    "SubgradientOracle",
    "SUITES",
    "UnsupportedInstanceError",
    "WitnessResult",
    "baseline_psgd",
    "complete_square",
    "envelope_gradient",
    "envelope_of_regularization",
    "fit_rate",
    "generate",
    "gr_convex",
    "gr_oracle_calls",
    "gr_sc",
    "instance_from_dict",
    "instance_to_dict",
    "l1_regression_instance",
    "load_config",
    "min_norm_subgradient",
    "near_stationarity_witness",
    "piecewise_linear_max_instance",
    "pssm_oracle_calls",
    "pssm_sc",
    "prox",
    "regularization_params",
    "replicate_stream",
    "rounds_to_match_weight",
    "run_experiment",
    "run_suite",
    "save_config",
    "seeded_stream",
    "shift_oracle",
    "strongly_convex_wrap",
    "sweep",
    "true_min",
    "worst_case_budget",
]
