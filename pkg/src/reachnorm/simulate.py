"""Synthetic event-log generator for a stable population with heavy-tailed churn.

The generator produces event streams whose distinct-count behavior has a
known fractal dimension ``r = 1 - shape_b``, so the estimator and the norm
combination can be validated against the truth:

* expected distinct ids per interval stays flat at ``population_n``, and
* expected cumulative distinct ids over ``j`` intervals is exactly
  ``population_n * j**r``.

Mechanism: members come from an unbounded reservoir of identities with
heavy-tailed personal visit rates (density proportional to
``rate**(-1 - r)``), each visiting as an independent Poisson stream.  That
mixture is realized directly: first appearances form a Poisson process with
cumulative intensity ``population_n * j**r`` over ``j`` intervals; each
member's personal rate is then drawn from the Gamma posterior implied by its
first-appearance time (shape ``1 - r``, inverse-scale equal to that time);
and the member shows up again in any later interval independently with
probability ``1 - exp(-rate)``.  Per-interval presence is what gets counted
and emitted — one event record per (member, interval).

Two deterministic random streams derive from the seed: a *visit* stream
that fixes the realization (who exists, when they first appear, when they
return), consumed in identical order by :func:`run_sim` and
:func:`emit_events` so their counts agree exactly, and a *stamp* stream used
only to place return visits inside their interval, which cannot perturb the
counts.

The lifetime scale parameter of the model does not enter the per-interval
statistics (only the tail shape does), so it has no effect here; ``burn_in``
shifts the reporting window later along the process, which changes the
realization but not the statistics, because the generator is stationary from
the first interval.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, NamedTuple

import numpy as np

from .ingest import write_events_csv, write_events_jsonl
from .pareto import ParetoLifetimeModel
from .series import CountSeries, CumulativeSeries, validate_pair

__all__ = [
    "SimConfig",
    "SimResult",
    "SimulationBudgetError",
    "run_sim",
    "emit_events",
    "load_sim_config",
    "ID_DIGITS",
]

ID_DIGITS = 12

_VISIT_STREAM = 0x52454143
_STAMP_STREAM = 0x5354414D


class SimulationBudgetError(ValueError):
    """The configuration implies more event records than the configured cap."""


@dataclass(frozen=True)
class SimConfig:
    """Configuration of one simulation run.

    ``horizon`` is the number of reported intervals, ``interval_width`` the
    width of each in output time units (timestamps scale with it; counts do
    not).  ``burn_in`` intervals are simulated before the reporting window
    and discarded.  ``max_events`` caps the expected number of emitted
    records (roughly ``population_n`` per simulated interval).
    """

    model: ParetoLifetimeModel
    horizon: int
    interval_width: float = 1.0
    seed: int = 0
    burn_in: int = 0
    max_events: float = 10**9

    def __post_init__(self) -> None:
        if not isinstance(self.model, ParetoLifetimeModel):
            raise ValueError(
                f"model must be a ParetoLifetimeModel, got {type(self.model).__name__}"
            )
        if not (
            isinstance(self.horizon, int)
            and not isinstance(self.horizon, bool)
            and self.horizon >= 1
        ):
            raise ValueError(f"horizon must be an integer >= 1, got {self.horizon!r}")
        if not (
            isinstance(self.interval_width, (int, float))
            and math.isfinite(self.interval_width)
            and self.interval_width > 0
        ):
            raise ValueError(f"interval width must be positive, got {self.interval_width!r}")
        if not (
            isinstance(self.seed, int)
            and not isinstance(self.seed, bool)
            and 0 <= self.seed < 2**64
        ):
            raise ValueError(f"seed must be an integer in [0, 2**64), got {self.seed!r}")
        if not (
            isinstance(self.burn_in, int)
            and not isinstance(self.burn_in, bool)
            and self.burn_in >= 0
        ):
            raise ValueError(f"burn-in must be a non-negative integer, got {self.burn_in!r}")
        if not (
            isinstance(self.max_events, (int, float))
            and math.isfinite(self.max_events)
            and self.max_events >= 1
        ):
            raise ValueError(f"event cap must be at least 1, got {self.max_events!r}")


@dataclass(frozen=True)
class SimResult:
    """Ground-truth output of one run.

    ``total_replacements`` is the number of distinct ids beyond the
    first-interval population (``distinct_ids - C_1``): the churn the span
    accumulated on top of a single interval's worth of members.
    """

    interval_counts: CountSeries
    cumulative_counts: CumulativeSeries
    total_replacements: int
    distinct_ids: int

    def __post_init__(self) -> None:
        validate_pair(self.interval_counts, self.cumulative_counts)
        if self.interval_counts.counts and self.cumulative_counts.cumulative[-1] != self.distinct_ids:
            raise ValueError("final cumulative count must equal the distinct-id total")
        if self.total_replacements != self.distinct_ids - (
            self.interval_counts.counts[0] if self.interval_counts.counts else 0
        ):
            raise ValueError("replacement total must be distinct ids minus the first interval count")


class _Realization(NamedTuple):
    """The drawn population, sorted by first-appearance time.

    ``first_interval`` is the reporting-window interval of each member's
    first appearance (0 = during burn-in, before the window), so returner
    candidates for interval ``j`` are exactly the sorted prefix with
    ``first_interval < j``.
    """

    first_interval: np.ndarray
    first_stamp: np.ndarray
    return_prob: np.ndarray
    rate: np.ndarray


def _expected_records(config: SimConfig) -> float:
    return float(config.model.population_n) * (config.horizon + config.burn_in)


def _check_budget(config: SimConfig) -> None:
    expected = _expected_records(config)
    if expected > config.max_events:
        raise SimulationBudgetError(
            f"{config.model.population_n} members over "
            f"{config.horizon + config.burn_in} intervals implies about "
            f"{expected:.3g} event records, above the cap of {config.max_events:.3g}"
        )


def _bucket_indices(timestamps: np.ndarray, width: float) -> np.ndarray:
    """Vectorized interval bucketing, matching ``series.interval_index`` exactly."""
    k = np.floor(timestamps / width).astype(np.int64)
    while True:
        too_high = k * width > timestamps
        k[too_high] -= 1
        too_low = (k + 1) * width <= timestamps
        k[too_low] += 1
        if not (too_high.any() or too_low.any()):
            return k + 1


def _realize(config: SimConfig, visit_rng: np.random.Generator) -> _Realization:
    model = config.model
    r = model.dimension_r
    width = float(config.interval_width)
    total_intervals = config.horizon + config.burn_in

    mean_members = model.population_n * float(total_intervals) ** r
    n_members = int(visit_rng.poisson(mean_members))
    uniforms = visit_rng.random(n_members)
    # First-appearance times over the whole simulated span, drawn from the
    # process with cumulative intensity population_n * tau**r (interval units).
    tau_first = total_intervals * uniforms ** (1.0 / r)
    np.maximum(tau_first, 1e-300, out=tau_first)
    rate = visit_rng.gamma(1.0 - r, 1.0 / tau_first) if n_members else np.empty(0)
    return_prob = -np.expm1(-rate)

    # Window-local output timestamps; members first seen during burn-in keep
    # a non-positive stamp and interval 0 (candidates from the first window
    # interval on).  In-window stamps are clamped into [tiny, horizon*width)
    # and bucketed through the same arithmetic ingestion uses, so emitted
    # events can never land in a different interval than the one counted.
    first_stamp = (tau_first - config.burn_in) * width
    in_window = first_stamp > 0.0
    upper = np.nextafter(config.horizon * width, -np.inf)
    first_stamp[in_window] = np.clip(first_stamp[in_window], 1e-300, upper)
    first_interval = np.zeros(n_members, dtype=np.int64)
    if in_window.any():
        first_interval[in_window] = _bucket_indices(first_stamp[in_window], width)

    order = np.argsort(tau_first, kind="stable")
    return _Realization(
        first_interval=first_interval[order],
        first_stamp=first_stamp[order],
        return_prob=return_prob[order],
        rate=rate[order],
    )


def _sweep(
    config: SimConfig,
    realization: _Realization,
    visit_rng: np.random.Generator,
    stamp_rng: np.random.Generator | None,
) -> tuple[np.ndarray, np.ndarray, tuple[np.ndarray, np.ndarray] | None]:
    """Walk the reporting window; returns per-interval counts, per-interval
    new-id counts, and (with a stamp generator) the event rows."""
    width = float(config.interval_width)
    horizon = config.horizon
    first_iv = realization.first_interval
    seen = np.zeros(first_iv.size, dtype=bool)
    counts = np.zeros(horizon, dtype=np.int64)
    new_ids = np.zeros(horizon, dtype=np.int64)
    stamp_chunks: list[np.ndarray] = []
    member_chunks: list[np.ndarray] = []

    window = np.arange(1, horizon + 1)
    lefts = np.searchsorted(first_iv, window, side="left")
    rights = np.searchsorted(first_iv, window, side="right")
    for j, left, right in zip(window, lefts, rights):
        left = int(left)
        right = int(right)
        draws = visit_rng.random(left)
        returner_pos = np.nonzero(draws < realization.return_prob[:left])[0]
        fresh = right - left
        counts[j - 1] = returner_pos.size + fresh
        new_ids[j - 1] = int(np.count_nonzero(~seen[returner_pos])) + fresh
        seen[returner_pos] = True
        seen[left:right] = True
        if stamp_rng is None:
            continue
        # Place each return visit at the first hit of the member's Poisson
        # stream inside the interval (truncated-exponential offset), clamped
        # strictly inside the interval so it buckets back to j.
        prob = realization.return_prob[returner_pos]
        offset = -np.log1p(-stamp_rng.random(returner_pos.size) * prob) / np.maximum(
            realization.rate[returner_pos], 1e-300
        )
        offset = np.clip(offset, 1e-12, 1.0 - 1e-9)
        stamps = ((j - 1) + offset) * width
        np.clip(stamps, (j - 1) * width, np.nextafter(j * width, -np.inf), out=stamps)
        stamp_chunks.append(stamps)
        member_chunks.append(returner_pos)
        stamp_chunks.append(realization.first_stamp[left:right])
        member_chunks.append(np.arange(left, right, dtype=np.int64))

    if stamp_rng is None:
        return counts, new_ids, None
    stamps_all = np.concatenate(stamp_chunks) if stamp_chunks else np.empty(0)
    members_all = (
        np.concatenate(member_chunks) if member_chunks else np.empty(0, dtype=np.int64)
    )
    return counts, new_ids, (stamps_all, members_all)


def _build_result(config: SimConfig, counts: np.ndarray, new_ids: np.ndarray) -> SimResult:
    cumulative = np.cumsum(new_ids)
    distinct = int(cumulative[-1]) if cumulative.size else 0
    first_count = int(counts[0]) if counts.size else 0
    return SimResult(
        interval_counts=CountSeries(
            tuple(int(c) for c in counts), start_index=1, width=config.interval_width
        ),
        cumulative_counts=CumulativeSeries(
            tuple(int(q) for q in cumulative), start_index=1, width=config.interval_width
        ),
        total_replacements=distinct - first_count,
        distinct_ids=distinct,
    )


def run_sim(config: SimConfig) -> SimResult:
    """Simulate one run and return its ground-truth count series.

    Deterministic given the seed; raises :class:`SimulationBudgetError`
    before doing any work if the configuration implies more event records
    than ``config.max_events``.
    """
    _check_budget(config)
    visit_rng = np.random.default_rng([_VISIT_STREAM, config.seed])
    realization = _realize(config, visit_rng)
    counts, new_ids, _ = _sweep(config, realization, visit_rng, None)
    return _build_result(config, counts, new_ids)


def emit_events(config: SimConfig, sink: IO[str], fmt: str = "jsonl") -> int:
    """Write the run's event log (one record per member per active interval).

    Identifiers are fixed-width decimal strings numbered in order of first
    appearance.  Returns the number of records written; ingesting them at
    ``config.interval_width`` reproduces :func:`run_sim`'s series exactly.
    """
    if fmt not in ("csv", "jsonl"):
        raise ValueError(f"unknown event format {fmt!r}")
    _check_budget(config)
    visit_rng = np.random.default_rng([_VISIT_STREAM, config.seed])
    stamp_rng = np.random.default_rng([_STAMP_STREAM, config.seed])
    realization = _realize(config, visit_rng)
    _, _, rows = _sweep(config, realization, visit_rng, stamp_rng)
    assert rows is not None
    stamps, members = rows

    order = np.lexsort((members, stamps))
    stamps = stamps[order]
    members = members[order]
    present, first_row = np.unique(members, return_index=True)
    appearance_rank = np.argsort(first_row, kind="stable")
    number = np.zeros(realization.first_interval.size, dtype=np.int64)
    number[present[appearance_rank]] = np.arange(1, present.size + 1)
    labels = [f"{k:0{ID_DIGITS}d}" for k in number[members].tolist()]

    records = zip(stamps.tolist(), labels)
    if fmt == "csv":
        return write_events_csv(sink, records)
    return write_events_jsonl(sink, records)


_CONFIG_KEYS = {
    "population_n": int,
    "shape_b": float,
    "scale_a": float,
    "horizon": int,
    "interval_width": float,
    "seed": int,
    "burn_in": int,
    "max_events": float,
}
_REQUIRED_KEYS = ("population_n", "shape_b", "horizon")


def load_sim_config(source: str | os.PathLike | IO[str] | Iterable[str]) -> SimConfig:
    """Parse a plain-text ``key=value`` configuration file into a SimConfig.

    Recognized keys: population_n, shape_b, horizon (required); scale_a
    (default 0.01), interval_width (1.0), seed (0), burn_in (0), max_events
    (10^9).  Blank lines and lines starting with ``#`` are ignored; unknown
    or duplicate keys are errors.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(Path(source), "r", encoding="utf-8") as handle:
            return load_sim_config(handle)

    values: dict[str, object] = {}
    for line_number, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, text = line.partition("=")
        key = key.strip()
        text = text.strip()
        if not sep or not key or not text:
            raise ValueError(f"config line {line_number}: expected key=value, got {raw.strip()!r}")
        if key not in _CONFIG_KEYS:
            raise ValueError(f"config line {line_number}: unknown key {key!r}")
        if key in values:
            raise ValueError(f"config line {line_number}: duplicate key {key!r}")
        try:
            values[key] = _CONFIG_KEYS[key](text)
        except ValueError:
            raise ValueError(
                f"config line {line_number}: cannot parse {text!r} as "
                f"{_CONFIG_KEYS[key].__name__} for {key!r}"
            ) from None

    missing = [key for key in _REQUIRED_KEYS if key not in values]
    if missing:
        raise ValueError(f"config is missing required keys: {', '.join(missing)}")

    model = ParetoLifetimeModel(
        scale_a=float(values.get("scale_a", 0.01)),
        shape_b=float(values["shape_b"]),
        population_n=int(values["population_n"]),
    )
    return SimConfig(
        model=model,
        horizon=int(values["horizon"]),
        interval_width=float(values.get("interval_width", 1.0)),
        seed=int(values.get("seed", 0)),
        burn_in=int(values.get("burn_in", 0)),
        max_events=float(values.get("max_events", 10**9)),
    )
