"""Shared fixtures: a session-scoped batch of simulator runs.

Several tests (scaling recovery, estimator accuracy, norm tracking,
forecast holdout) all study the same grid of simulations — four shape
values times ten seeds at population 10^4 over 100 intervals — so the
batch is built once per session and timed, letting the runtime budget be
asserted alongside the statistical checks.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import pytest

from reachnorm import ParetoLifetimeModel, SimConfig, SimResult, run_sim

SHAPE_VALUES = (0.2, 0.4, 0.6, 0.8)
SEEDS = tuple(range(10))
POPULATION = 10_000
HORIZON = 100


@dataclass
class SimBatch:
    runs: dict = field(default_factory=dict)
    elapsed_seconds: float = 0.0

    def result(self, shape_b: float, seed: int) -> SimResult:
        return self.runs[(shape_b, seed)]


@pytest.fixture(scope="session")
def sim_batch() -> SimBatch:
    batch = SimBatch()
    start = time.perf_counter()
    for shape_b in SHAPE_VALUES:
        model = ParetoLifetimeModel(
            scale_a=0.01, shape_b=shape_b, population_n=POPULATION
        )
        for seed in SEEDS:
            config = SimConfig(model=model, horizon=HORIZON, seed=seed)
            batch.runs[(shape_b, seed)] = run_sim(config)
    batch.elapsed_seconds = time.perf_counter() - start
    return batch
