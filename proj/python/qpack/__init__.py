"""QAOA application benchmark: MaxCut, dominating set and TSP on a state-vector simulator."""

import json

from ._qpack import (
    CapacityError,
    ConfigurationError,
    __version__,
    benchmark_json,
    bias_test,
    circuit_counts,
    fit_exponential,
    report_csv,
    resource_formula,
    run_instance,
    solve_exact,
    summarize,
)

__all__ = [
    "CapacityError",
    "ConfigurationError",
    "__version__",
    "benchmark",
    "benchmark_json",
    "bias_test",
    "circuit_counts",
    "fit_exponential",
    "report_csv",
    "resource_formula",
    "run_instance",
    "solve_exact",
    "summarize",
]


def benchmark(
    apps=("maxcut", "dsp", "tsp"),
    n_min=3,
    n_max=8,
    depths=(1, 2, 3, 4),
    runs=30,
    shots=100,
    seed=1,
    optimizer="nelder-mead",
    exact_expectation=False,
    max_evals=300,
    tsp_row_weight=2,
    bias_shots=10000,
):
    """Run the full benchmark and return the report as a dict."""
    text = benchmark_json(
        list(apps),
        n_min,
        n_max,
        list(depths),
        runs,
        shots,
        seed,
        optimizer,
        exact_expectation,
        max_evals,
        tsp_row_weight,
        bias_shots,
    )
    return json.loads(text)
