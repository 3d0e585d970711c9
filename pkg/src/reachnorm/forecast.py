"""Reach forecasting and the saturation ceiling.

Once the norm exponent of a count series is fitted, the distinct total over
a longer span can be predicted two ways: directly from the scaling law
``c1 * t**r``, or by extending the observed per-interval counts with
hypothesized future counts and folding the whole sequence through the L^p
combination.  The two agree exactly when every count equals ``c1``.

The saturation ceiling is the heuristic upper bound ``1 - r`` on the
fraction of the underlying population a campaign can reach: the closer the
dimension ``r`` is to 1 (short-lived, churning ids), the smaller the
reachable fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fitting import DimensionFit
from .norms import geometric_mean, lp_combine, lp_combine_partial, scaling_law

__all__ = [
    "FitNotConvergedError",
    "ReachForecast",
    "SaturationEstimate",
    "forecast_scaling",
    "forecast_lp",
    "saturation_ceiling",
    "DEFAULT_BASELINE_WINDOW",
]

DEFAULT_BASELINE_WINDOW = 7


class FitNotConvergedError(RuntimeError):
    """Refusing to forecast from a fit that did not converge (pass force=True to override)."""


@dataclass(frozen=True)
class ReachForecast:
    """Predicted cumulative distinct counts over growing spans.

    ``predicted[k]`` is the estimate for a span of ``start_span + k``
    intervals; the last entry covers ``horizon`` intervals.  ``method`` is
    ``"scaling-law"`` (pure power law from span 1) or ``"lp-extension"``
    (observed counts extended with hypothesized future counts).
    """

    horizon: int
    start_span: int
    predicted: tuple[float, ...]
    method: str
    fit: DimensionFit

    def __post_init__(self) -> None:
        if self.method not in ("scaling-law", "lp-extension"):
            raise ValueError(f"unknown forecast method {self.method!r}")
        if self.start_span < 1 or not self.predicted:
            raise ValueError("forecast must cover at least one span")
        if self.horizon != self.start_span + len(self.predicted) - 1:
            raise ValueError(
                f"horizon {self.horizon} does not match spans "
                f"{self.start_span}..{self.start_span + len(self.predicted) - 1}"
            )
        values = np.asarray(self.predicted, dtype=float)
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("predictions must be finite and non-negative")
        if np.any(np.diff(values) < -1e-9 * np.maximum(values[:-1], 1.0)):
            raise ValueError("predictions must be non-decreasing")

    @property
    def final(self) -> float:
        """The prediction at the full horizon."""
        return self.predicted[-1]


@dataclass(frozen=True)
class SaturationEstimate:
    """Upper-bound heuristic on the reachable population fraction: ``1 - r``."""

    ceiling: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.ceiling) and 0.0 <= self.ceiling < 1.0):
            raise ValueError(f"saturation ceiling must lie in [0, 1), got {self.ceiling}")


def _check_fit(fit: DimensionFit, force: bool) -> DimensionFit:
    if not isinstance(fit, DimensionFit):
        raise TypeError(f"expected a DimensionFit, got {type(fit).__name__}")
    if not fit.converged and not force:
        raise FitNotConvergedError(
            "the exponent fit did not converge; pass force=True to forecast anyway"
        )
    return fit


def forecast_scaling(
    fit: DimensionFit, c1: float, horizon: int, force: bool = False
) -> ReachForecast:
    """Predict cumulative counts ``c1 * t**r`` for spans ``t = 1..horizon``.

    ``c1`` is the single-interval level; the geometric mean of the observed
    interval counts is the conventional choice.
    """
    fit = _check_fit(fit, force)
    if not (isinstance(horizon, int) and not isinstance(horizon, bool) and horizon >= 1):
        raise ValueError(f"horizon must be an integer >= 1, got {horizon!r}")
    predicted = tuple(scaling_law(c1, fit.r, t) for t in range(1, horizon + 1))
    return ReachForecast(
        horizon=horizon,
        start_span=1,
        predicted=predicted,
        method="scaling-law",
        fit=fit,
    )


def forecast_lp(
    fit: DimensionFit,
    observed: object,
    future_counts: object = None,
    horizon: int | None = None,
    force: bool = False,
) -> ReachForecast:
    """Predict cumulative counts by L^p extension of the observed counts.

    ``predicted[k]`` combines the observed counts plus the first ``k``
    hypothesized future counts at the fitted exponent, so the first entry is
    the combination of the observed counts alone.  When ``future_counts`` is
    omitted, each future interval repeats the geometric mean of the last
    ``DEFAULT_BASELINE_WINDOW`` observed counts out to ``horizon``; with
    neither given the forecast covers the observed span only.
    """
    fit = _check_fit(fit, force)
    observed_values = np.asarray(getattr(observed, "counts", observed), dtype=float)
    if observed_values.ndim != 1 or observed_values.size == 0:
        raise ValueError("observed counts must be a non-empty one-dimensional sequence")
    n_observed = int(observed_values.size)

    if future_counts is not None:
        future = tuple(float(x) for x in np.asarray(future_counts, dtype=float))
        if horizon is not None and horizon != n_observed + len(future):
            raise ValueError(
                f"horizon {horizon} conflicts with {n_observed} observed plus "
                f"{len(future)} future intervals"
            )
    elif horizon is not None:
        if not (isinstance(horizon, int) and not isinstance(horizon, bool)) or horizon < n_observed:
            raise ValueError(
                f"horizon must be an integer >= the {n_observed} observed intervals, got {horizon!r}"
            )
        baseline = geometric_mean(observed_values[-DEFAULT_BASELINE_WINDOW:])
        future = (baseline,) * (horizon - n_observed)
    else:
        future = ()

    running = lp_combine(observed_values, fit.p)
    predicted = [running]
    for value in future:
        running = lp_combine_partial(running, (value,), fit.p)
        predicted.append(running)
    return ReachForecast(
        horizon=n_observed + len(future),
        start_span=n_observed,
        predicted=tuple(predicted),
        method="lp-extension",
        fit=fit,
    )


def saturation_ceiling(fit: DimensionFit) -> SaturationEstimate:
    """The heuristic ceiling ``1 - r`` on the reachable population fraction."""
    if not isinstance(fit, DimensionFit):
        raise TypeError(f"expected a DimensionFit, got {type(fit).__name__}")
    return SaturationEstimate(ceiling=1.0 - fit.r)
