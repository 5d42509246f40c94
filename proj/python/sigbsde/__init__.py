"""Signature-regression BSDE solver and dynamic risk-measure benchmarks."""

from ._sigbsde import (
    ExperimentConfig,
    benchmark_names,
    conditional_expectation,
    erl2,
    run_experiment,
    sample_brownian,
    signature,
    solve_benchmark,
)

__all__ = [
    "ExperimentConfig",
    "benchmark_names",
    "conditional_expectation",
    "erl2",
    "run_experiment",
    "sample_brownian",
    "signature",
    "solve_benchmark",
]
