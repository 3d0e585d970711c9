"""Norm-exponent estimation from paired count and cumulative series.

Given per-interval distinct counts ``C_m..C_n`` and cumulative distinct
counts ``Q_m..Q_n`` (with ``Q_{m-1} = 0``), the exponent ``p`` that makes the
L^p combination of the counts reproduce the cumulative series satisfies, at
every growth step ``j``::

    Q_j^p - Q_{j-1}^p = C_j^p

Taking logs turns each step into a residual

    delta_j = log((Q_j^p - Q_{j-1}^p) / C_j^p) / log(2*C_j / (Q_j + Q_{j-1}))

whose sign says which way ``p`` must move; the fit damps the mean residual
into ``p`` until it vanishes.  Steps are only informative when the interval
count is well below the running cumulative level, so a step enters the mean
only when ``0 < 1.6*C_j < (Q_j + Q_{j-1}) / 2``; steps where the cumulative
series did not grow at all (``Q_j = Q_{j-1}``) are likewise excluded since
their residual is undefined.  The reported spread ``sigma`` is the root mean
square of the included residuals at the fitted exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

__all__ = [
    "FitInfeasibleError",
    "FitSettings",
    "DimensionFit",
    "DeltaStep",
    "delta_step",
    "initial_guess",
    "fit_p",
    "P_MIN",
    "P_MAX",
]

P_MIN = 1.0
P_MAX = 50.0


class FitInfeasibleError(ValueError):
    """No step of the series is informative enough to estimate an exponent."""


@dataclass(frozen=True)
class FitSettings:
    """Knobs for the damped fixed-point iteration.

    ``damping`` scales each update (1.0 = undamped, which tends to oscillate
    slowly); iteration stops when the mean residual magnitude drops below
    ``tolerance`` or after ``max_iterations`` updates.  ``initial_p``
    overrides the data-driven starting exponent.
    """

    damping: float = 0.632
    tolerance: float = 1e-10
    max_iterations: int = 200
    initial_p: float | None = None

    def __post_init__(self) -> None:
        if not (
            isinstance(self.damping, (int, float))
            and math.isfinite(self.damping)
            and 0.0 < self.damping <= 1.0
        ):
            raise ValueError(f"damping must lie in (0, 1], got {self.damping!r}")
        if not (
            isinstance(self.tolerance, (int, float))
            and math.isfinite(self.tolerance)
            and self.tolerance > 0
        ):
            raise ValueError(f"tolerance must be positive, got {self.tolerance!r}")
        if not (
            isinstance(self.max_iterations, int)
            and not isinstance(self.max_iterations, bool)
            and self.max_iterations >= 1
        ):
            raise ValueError(
                f"max_iterations must be an integer >= 1, got {self.max_iterations!r}"
            )
        if self.initial_p is not None and not (
            isinstance(self.initial_p, (int, float))
            and math.isfinite(self.initial_p)
            and P_MIN <= self.initial_p <= P_MAX
        ):
            raise ValueError(
                f"initial_p must lie in [{P_MIN}, {P_MAX}], got {self.initial_p!r}"
            )


@dataclass(frozen=True)
class DimensionFit:
    """Result of the exponent fit.

    ``p`` is the norm exponent, ``r = 1/p`` the fractal dimension of the
    count series, ``sigma`` the RMS residual over included steps,
    ``iterations`` the number of damped updates applied, and
    ``included_steps``/``excluded_steps`` partition the series steps.
    ``converged`` is False when the residual never fell below tolerance or
    the final exponent was pinned at a clamp bound.
    """

    p: float
    r: float
    sigma: float
    iterations: int
    included_steps: int
    excluded_steps: int
    converged: bool

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p) and P_MIN <= self.p <= P_MAX):
            raise ValueError(f"fitted exponent must lie in [{P_MIN}, {P_MAX}], got {self.p}")
        if abs(self.r * self.p - 1.0) > 1e-12:
            raise ValueError(f"dimension {self.r} is not the reciprocal of exponent {self.p}")
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")
        if self.iterations < 0 or self.included_steps < 0 or self.excluded_steps < 0:
            raise ValueError("iteration and step counters must be non-negative")

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "r": self.r,
            "sigma": self.sigma,
            "iterations": self.iterations,
            "included_steps": self.included_steps,
            "excluded_steps": self.excluded_steps,
            "converged": self.converged,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DimensionFit":
        fields = (
            "p",
            "r",
            "sigma",
            "iterations",
            "included_steps",
            "excluded_steps",
            "converged",
        )
        missing = [name for name in fields if name not in data]
        if missing:
            raise ValueError(f"fit report is missing fields: {', '.join(missing)}")
        return cls(
            p=float(data["p"]),
            r=float(data["r"]),
            sigma=float(data["sigma"]),
            iterations=int(data["iterations"]),
            included_steps=int(data["included_steps"]),
            excluded_steps=int(data["excluded_steps"]),
            converged=bool(data["converged"]),
        )


class DeltaStep(NamedTuple):
    """One evaluation of the mean residual at a candidate exponent."""

    delta: float
    included: int
    per_step: tuple[float, ...]


def _series_arrays(counts: object, cumulative: object) -> tuple[np.ndarray, np.ndarray]:
    c_values = getattr(counts, "counts", counts)
    q_values = getattr(cumulative, "cumulative", cumulative)
    c = np.asarray(c_values, dtype=float)
    q = np.asarray(q_values, dtype=float)
    if c.ndim != 1 or q.ndim != 1:
        raise ValueError("count and cumulative series must be one-dimensional")
    if c.size != q.size:
        raise ValueError(
            f"count and cumulative series must align, got lengths {c.size} and {q.size}"
        )
    if c.size == 0:
        raise FitInfeasibleError("empty series")
    if not (np.all(np.isfinite(c)) and np.all(np.isfinite(q))):
        raise ValueError("series values must be finite")
    if np.any(c < 0) or np.any(q < 0):
        raise ValueError("series values must be non-negative")
    if np.any(np.diff(q) < 0):
        raise ValueError("cumulative series must be non-decreasing")
    return c, q


def _inclusion_mask(c: np.ndarray, q: np.ndarray) -> np.ndarray:
    q_prev = np.concatenate(([0.0], q[:-1]))
    informative = (c > 0) & (1.6 * c < (q + q_prev) / 2.0)
    grew = q > q_prev
    return informative & grew


def delta_step(counts: object, cumulative: object, p: float) -> DeltaStep:
    """Mean residual of the step identity at exponent ``p``.

    Returns the mean over included steps, the included-step count, and the
    per-step residuals (in index order).  Raises
    :class:`FitInfeasibleError` when no step is included.
    """
    p = float(p)
    if not math.isfinite(p) or p < P_MIN:
        raise ValueError(f"exponent must be >= {P_MIN}, got {p}")
    c, q = _series_arrays(counts, cumulative)
    mask = _inclusion_mask(c, q)
    if not mask.any():
        raise FitInfeasibleError(
            "no informative steps: every step has a zero count, no cumulative growth, "
            "or an interval count too close to the cumulative level"
        )
    q_prev = np.concatenate(([0.0], q[:-1]))
    cj = c[mask]
    qj = q[mask]
    qp = q_prev[mask]
    log_qj = np.log(qj)
    log_cj = np.log(cj)
    # log(Q_j^p - Q_{j-1}^p) computed as p*log(Q_j) + log(1 - (Q_{j-1}/Q_j)^p)
    # to avoid cancellation between two huge powers.
    with np.errstate(divide="ignore"):
        ratio_term = np.where(
            qp > 0, np.log1p(-np.exp(p * (np.log(np.maximum(qp, 1e-300)) - log_qj))), 0.0
        )
    log_numerator = p * log_qj + ratio_term
    log_shrink = math.log(2.0) + log_cj - np.log(qj + qp)
    per = (log_numerator - p * log_cj) / log_shrink
    return DeltaStep(float(per.mean()), int(mask.sum()), tuple(float(v) for v in per))


def initial_guess(counts: object, cumulative: object) -> float:
    """Data-driven starting exponent, inverting the scaling law.

    With ``G`` the geometric mean of the positive interval counts and ``Q_n``
    the final cumulative count over ``n`` intervals, ``Q_n = G * n**(1/p)``
    gives ``p = log(n) / log(Q_n / G)``, clamped to [1.0001, 20].  A flat
    cumulative series (``Q_n = G``) pins the guess at 20 (max-norm limit); a
    final cumulative below ``G`` falls back to the near-linear 1.0001.
    """
    c, q = _series_arrays(counts, cumulative)
    if c.size < 2:
        raise ValueError("initial guess needs at least two intervals")
    positive = c[c > 0]
    if positive.size == 0:
        raise FitInfeasibleError("no positive interval counts")
    gmean = float(np.exp(np.mean(np.log(positive))))
    q_final = float(q[-1])
    if q_final < gmean:
        return 1.0001
    if q_final == gmean:
        return 20.0
    guess = math.log(c.size) / math.log(q_final / gmean)
    return min(max(guess, 1.0001), 20.0)


def fit_p(
    counts: object, cumulative: object, settings: FitSettings | None = None
) -> DimensionFit:
    """Fit the norm exponent by damped fixed-point iteration.

    Repeats ``p <- p + damping * delta`` until the mean residual magnitude
    drops below tolerance, clamping ``p`` to [``P_MIN``, ``P_MAX``] at every
    update.  Non-convergence (tolerance never reached, or the final update
    clamped) is reported through ``converged=False``, not an exception;
    a series with no informative steps raises :class:`FitInfeasibleError`.
    """
    if settings is None:
        settings = FitSettings()
    c, q = _series_arrays(counts, cumulative)
    total_steps = int(c.size)
    if settings.initial_p is not None:
        p = float(settings.initial_p)
    else:
        p = initial_guess(c, q)

    step = delta_step(c, q, p)
    iterations = 0
    last_update_clamped = False
    while abs(step.delta) >= settings.tolerance and iterations < settings.max_iterations:
        raw = p + settings.damping * step.delta
        p = min(max(raw, P_MIN), P_MAX)
        last_update_clamped = p != raw
        iterations += 1
        step = delta_step(c, q, p)

    converged = abs(step.delta) < settings.tolerance and not last_update_clamped
    sigma = float(np.sqrt(np.mean(np.square(step.per_step))))
    return DimensionFit(
        p=p,
        r=1.0 / p,
        sigma=sigma,
        iterations=iterations,
        included_steps=step.included,
        excluded_steps=total_steps - step.included,
        converged=converged,
    )
