"""reachnorm: fractal scaling of distinct-count series.

Distinct-identifier counts over time windows do not add up — the same ids
recur — but they combine: an L^p norm of the per-interval counts tracks the
true cumulative distinct total when the exponent ``p`` matches the data, and
``r = 1/p`` acts as a fractal dimension of the series (``Q_t ~ Q_1 * t**r``).
This package provides the norm combination, an estimator for ``p`` from
paired interval/cumulative series, a heavy-tailed (Pareto) lifetime model
explaining where such scaling comes from, a simulator that generates event
logs with a known dimension, exact event-log ingestion, reach forecasting
with a saturation ceiling, and a CLI tying it together.
"""

from .fitting import (
    DeltaStep,
    DimensionFit,
    FitInfeasibleError,
    FitSettings,
    delta_step,
    fit_p,
    initial_guess,
)
from .forecast import (
    FitNotConvergedError,
    ReachForecast,
    SaturationEstimate,
    forecast_lp,
    forecast_scaling,
    saturation_ceiling,
)
from .ingest import (
    EventParseError,
    ingest,
    parse_timestamp,
    read_events,
    read_events_csv,
    read_events_jsonl,
    rebucket,
    write_events_csv,
    write_events_jsonl,
)
from .norms import geometric_mean, lp_combine, lp_combine_partial, scaling_law
from .pareto import (
    ParetoLifetimeModel,
    expected_count,
    expected_replacements,
    lifetime_cdf,
    lifetime_pdf,
    sample_lifetime,
)
from .series import (
    CountSeries,
    CumulativeSeries,
    EventRecord,
    interval_index,
    read_counts_csv,
    validate_pair,
    write_counts_csv,
)
from .simulate import (
    SimConfig,
    SimResult,
    SimulationBudgetError,
    emit_events,
    load_sim_config,
    run_sim,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # norms
    "lp_combine",
    "lp_combine_partial",
    "scaling_law",
    "geometric_mean",
    # lifetime model
    "ParetoLifetimeModel",
    "lifetime_pdf",
    "lifetime_cdf",
    "sample_lifetime",
    "expected_replacements",
    "expected_count",
    # series and ingestion
    "EventRecord",
    "CountSeries",
    "CumulativeSeries",
    "interval_index",
    "validate_pair",
    "read_counts_csv",
    "write_counts_csv",
    "EventParseError",
    "parse_timestamp",
    "read_events",
    "read_events_csv",
    "read_events_jsonl",
    "write_events_csv",
    "write_events_jsonl",
    "ingest",
    "rebucket",
    # fitting
    "DimensionFit",
    "FitSettings",
    "FitInfeasibleError",
    "DeltaStep",
    "delta_step",
    "initial_guess",
    "fit_p",
    # forecasting
    "ReachForecast",
    "SaturationEstimate",
    "FitNotConvergedError",
    "forecast_scaling",
    "forecast_lp",
    "saturation_ceiling",
    # simulation
    "SimConfig",
    "SimResult",
    "SimulationBudgetError",
    "run_sim",
    "emit_events",
    "load_sim_config",
]
