"""Heavy-tailed (Pareto) membership-lifetime model.

Members of a fixed-size population stay for a Pareto-distributed lifetime
``X`` with density ``b * a**b / x**(b + 1)`` on ``x >= a`` and are replaced on
departure.  For ``0 < b < 1`` the lifetime has infinite mean, which is what
produces power-law growth of the distinct total: over ``t`` intervals a
population of ``n`` slots meets ``n * t ** (1 - b)`` distinct members in
expectation.  The fractal dimension of the resulting count series is
``r = 1 - b``.

Note on :func:`expected_replacements`: the closed form arises from setting
the minimum lifetime to ``1/t`` and averaging ``n * t / X`` over lifetimes
``X >= 1`` only, without renormalizing the truncated density.  The function
reproduces that formula exactly; the companion Monte-Carlo check in the test
suite applies the same truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ParetoLifetimeModel",
    "lifetime_pdf",
    "lifetime_cdf",
    "sample_lifetime",
    "expected_replacements",
    "expected_count",
]


@dataclass(frozen=True)
class ParetoLifetimeModel:
    """A population of ``population_n`` slots with Pareto lifetimes.

    ``scale_a`` is the minimum lifetime (in interval widths) and ``shape_b``
    the tail exponent, restricted to ``0 < shape_b < 1`` — the heavy-tailed
    regime in which replacement flow follows a power law rather than a
    constant rate.
    """

    scale_a: float
    shape_b: float
    population_n: int

    def __post_init__(self) -> None:
        if not (
            isinstance(self.scale_a, (int, float))
            and math.isfinite(self.scale_a)
            and self.scale_a > 0
        ):
            raise ValueError(f"lifetime scale must be a positive real, got {self.scale_a!r}")
        if not (
            isinstance(self.shape_b, (int, float))
            and math.isfinite(self.shape_b)
            and 0.0 < self.shape_b < 1.0
        ):
            raise ValueError(
                f"lifetime shape must lie strictly in (0, 1), got {self.shape_b!r}"
            )
        if not (
            isinstance(self.population_n, int)
            and not isinstance(self.population_n, bool)
            and self.population_n >= 1
        ):
            raise ValueError(
                f"population size must be an integer >= 1, got {self.population_n!r}"
            )

    @property
    def dimension_r(self) -> float:
        """Fractal dimension of the resulting count series: ``1 - shape_b``."""
        return 1.0 - self.shape_b


def _as_lifetime_array(model: ParetoLifetimeModel, x: object) -> np.ndarray:
    xs = np.asarray(x, dtype=float)
    if xs.size and not np.all(np.isfinite(xs)):
        raise ValueError("lifetime must be finite")
    if xs.size and np.any(xs < model.scale_a):
        raise ValueError(
            f"lifetime below the minimum {model.scale_a} is outside the support"
        )
    return xs


def _scalar_like(template: object, out: np.ndarray) -> float | np.ndarray:
    return float(out) if np.isscalar(template) or out.ndim == 0 else out


def lifetime_pdf(model: ParetoLifetimeModel, x: float | np.ndarray) -> float | np.ndarray:
    """Lifetime density ``b * a**b / x**(b+1)`` at ``x >= scale_a``."""
    xs = _as_lifetime_array(model, x)
    a, b = model.scale_a, model.shape_b
    return _scalar_like(x, b * a**b / xs ** (b + 1.0))


def lifetime_cdf(model: ParetoLifetimeModel, x: float | np.ndarray) -> float | np.ndarray:
    """Probability a lifetime is below ``x``: ``1 - (a / x)**b`` for ``x >= scale_a``."""
    xs = _as_lifetime_array(model, x)
    a, b = model.scale_a, model.shape_b
    return _scalar_like(x, -np.expm1(b * (np.log(a) - np.log(xs))))


def sample_lifetime(
    model: ParetoLifetimeModel, u: float | np.ndarray
) -> float | np.ndarray:
    """Map uniform draws ``u`` in ``(0, 1]`` to lifetimes by the inverse CDF.

    ``u = 1`` gives the minimum lifetime ``scale_a`` and ``u -> 0`` gives
    arbitrarily long stays; ``u = 0`` itself is rejected (infinite lifetime).
    Accepts a scalar or an ndarray.
    """
    us = np.asarray(u, dtype=float)
    if us.size and (
        not np.all(np.isfinite(us)) or np.any(us <= 0.0) or np.any(us > 1.0)
    ):
        raise ValueError("uniform draws must lie in (0, 1]")
    return _scalar_like(u, model.scale_a * us ** (-1.0 / model.shape_b))


def _check_span(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 1.0:
        raise ValueError(f"span must be at least one interval, got {t}")
    return t


def expected_replacements(model: ParetoLifetimeModel, t: float) -> float:
    """Expected number of member replacements over a span of ``t`` intervals.

    Closed form ``n * (b / (b + 1)) * t ** (1 - b)``: averaging the per-slot
    replacement count ``t / X`` over lifetimes ``X >= 1`` measured in units
    of the span (minimum lifetime ``1/t``), then summing over ``n`` slots.
    Sub-linear in ``t`` because long lifetimes dominate the average.
    """
    t = _check_span(t)
    b = model.shape_b
    return model.population_n * (b / (b + 1.0)) * t ** (1.0 - b)


def expected_count(model: ParetoLifetimeModel, t: float) -> float:
    """Expected distinct members seen over ``t`` intervals: ``n * t ** (1 - b)``.

    Equals ``((2 - r) / (1 - r)) * expected_replacements(model, t)`` with
    ``r = 1 - b``: the initial occupants plus the replacement flow, in fixed
    proportion.
    """
    t = _check_span(t)
    return model.population_n * t ** (1.0 - model.shape_b)
