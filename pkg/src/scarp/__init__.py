"""Robust bi-objective optimization for arc routing with stochastic demands.

The package models capacitated arc routing instances whose edge demands are
random, evaluates route plans analytically (expected total cost, expected
makespan, their deviations, and penalized robustness criteria), searches the
cost/makespan trade-off with an elitist multi-objective genetic algorithm,
and validates the analytical model by Monte Carlo replication of plan
execution with mid-trip replenishment returns.
"""

from .encoding import (
    Chromosome,
    Solution,
    SplitError,
    Trip,
    evaluate_deterministic,
    random_chromosome,
    split,
    tasks_to_chromosome,
    validate_chromosome,
)
from .instance import (
    Edge,
    Instance,
    InstanceError,
    TaskGraph,
    build_task_graph,
    format_instance,
    load_instance,
    node_shortest_paths,
    parse_instance,
    validate_instance,
)
from .moga import (
    GAParams,
    Individual,
    ObjectiveBounds,
    RunResult,
    crowded_tournament,
    crowding_distance,
    directed_local_search,
    direction_weight,
    mutate,
    non_dominated_sort,
    nsga2_run,
    ox_crossover,
)
from .replication import (
    QualityReport,
    ReplicationConfig,
    ReplicationReport,
    quality_gaps,
    replicate,
    sample_demands,
    simulate_execution,
    square_plot_data,
)
from .stochastic import (
    DemandModel,
    Penalties,
    StochasticEval,
    TooManyTripsError,
    TripStochastics,
    cost_moments,
    evaluate_solution,
    extra_trip_distribution,
    fitness,
    makespan_moments_exact,
    makespan_moments_truncated,
    normal_cdf,
    overflow_probability,
    recourse_cost,
    trip_count_moments,
    trip_stochastics,
)

__version__ = "0.1.0"

__all__ = [
    "Chromosome",
    "DemandModel",
    "Edge",
    "GAParams",
    "Individual",
    "Instance",
    "InstanceError",
    "ObjectiveBounds",
    "Penalties",
    "QualityReport",
    "ReplicationConfig",
    "ReplicationReport",
    "RunResult",
    "Solution",
    "SplitError",
    "StochasticEval",
    "TaskGraph",
    "TooManyTripsError",
    "Trip",
    "TripStochastics",
    "build_task_graph",
    "cost_moments",
    "crowded_tournament",
    "crowding_distance",
    "directed_local_search",
    "direction_weight",
    "evaluate_deterministic",
    "evaluate_solution",
    "extra_trip_distribution",
    "fitness",
    "format_instance",
    "load_instance",
    "makespan_moments_exact",
    "makespan_moments_truncated",
    "mutate",
    "node_shortest_paths",
    "non_dominated_sort",
    "normal_cdf",
    "nsga2_run",
    "overflow_probability",
    "ox_crossover",
    "parse_instance",
    "quality_gaps",
    "random_chromosome",
    "recourse_cost",
    "replicate",
    "sample_demands",
    "simulate_execution",
    "split",
    "square_plot_data",
    "tasks_to_chromosome",
    "trip_count_moments",
    "trip_stochastics",
    "validate_chromosome",
    "validate_instance",
    "__version__",
]
