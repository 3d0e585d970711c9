"""Independent reference implementations used to cross-check the library.

Everything here is deliberately written from first principles with plain
numpy (brute-force search, direct formulas, Monte-Carlo averaging) and does
not call into :mod:`reachnorm` internals, so agreement between the two is
meaningful evidence rather than a tautology.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "loglog_slope",
    "naive_lp",
    "delta_profile",
    "grid_search_p",
    "mc_truncated_replacements",
]


def loglog_slope(times, values) -> float:
    """Least-squares slope of log(values) against log(times).

    Entries with non-positive value are dropped (they have no logarithm);
    times must all be positive.
    """

    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.shape != v.shape:
        raise ValueError("times and values must have the same length")
    if np.any(t <= 0.0):
        raise ValueError("times must be positive")
    keep = v > 0.0
    if int(keep.sum()) < 2:
        raise ValueError("need at least two positive values for a slope")
    slope, _ = np.polyfit(np.log(t[keep]), np.log(v[keep]), 1)
    return float(slope)


def naive_lp(values, p: float) -> float:
    """Textbook (sum of p-th powers)**(1/p), with fsum for the accumulation.

    Only safe for magnitudes where x**p does not overflow; the production
    routine exists precisely to remove that restriction, so this reference
    is used on moderate inputs.
    """

    xs = [float(x) for x in values]
    if not xs:
        raise ValueError("need at least one value")
    if math.isinf(p):
        return max(xs)
    return math.fsum(x**p for x in xs) ** (1.0 / p)


def _step_terms(counts, cumulative):
    """Shared setup: per-step arrays and the inclusion mask.

    A step j compares the cumulative rise across interval j with the
    interval count; it is informative only when the count is positive,
    the cumulative actually rose, and the count sits well below the
    mid-cumulative level (2*C_j < 0.625 * (Q_j + Q_{j-1}))."""

    c = np.asarray(counts, dtype=float)
    q = np.asarray(cumulative, dtype=float)
    if c.shape != q.shape or c.ndim != 1 or c.size == 0:
        raise ValueError("counts and cumulative must be equal-length 1-D")
    q_prev = np.concatenate(([0.0], q[:-1]))
    mask = (c > 0.0) & (1.6 * c < 0.5 * (q + q_prev)) & (q > q_prev)
    return c, q, q_prev, mask


def delta_profile(p: float, counts, cumulative) -> float:
    """Mean per-step exponent residual at a candidate p.

    For each included step: log((Q_j**p - Q_{j-1}**p) / C_j**p) divided by
    log(2*C_j / (Q_j + Q_{j-1})).  The fitted exponent is the root of this
    mean as a function of p.
    """

    c, q, q_prev, mask = _step_terms(counts, cumulative)
    if not mask.any():
        raise ValueError("no informative steps")
    c, q, q_prev = c[mask], q[mask], q_prev[mask]
    rise = np.power(q, p) - np.power(q_prev, p)
    num = np.log(rise) - p * np.log(c)
    den = np.log(2.0 * c / (q + q_prev))
    return float(np.mean(num / den))


def grid_search_p(
    counts,
    cumulative,
    lo: float = 1.0,
    hi: float = 8.0,
    step: float = 0.001,
) -> float:
    """Brute-force grid search for the exponent.

    Minimizes the squared log-misfit of the step identity,
    sum_j log((Q_j**p - Q_{j-1}**p) / C_j**p)**2 over included steps,
    evaluated on a uniform grid over [lo, hi].
    """

    c, q, q_prev, mask = _step_terms(counts, cumulative)
    if not mask.any():
        raise ValueError("no informative steps")
    c, q, q_prev = c[mask], q[mask], q_prev[mask]
    grid = np.arange(lo, hi + step / 2.0, step)
    # shape (grid, steps)
    pcol = grid[:, None]
    rise = np.power(q[None, :], pcol) - np.power(q_prev[None, :], pcol)
    num = np.log(rise) - pcol * np.log(c[None, :])
    objective = np.sum(num**2, axis=1)
    return float(grid[int(np.argmin(objective))])


def mc_truncated_replacements(
    population_n: int,
    shape_b: float,
    span_t: float,
    samples: int = 10**7,
    seed: int = 0,
    chunk: int = 2_500_000,
) -> float:
    """Monte-Carlo mean of N*t/X with X Pareto(scale 1/t, shape B).

    Samples X by inverse transform, X = (1/t) * u**(-1/B) for u in (0, 1],
    and zeroes every draw with X < 1 (individuals whose mean turnover is
    faster than one interval are left out of the average).
    """

    rng = np.random.default_rng(seed)
    total = 0.0
    done = 0
    scale = 1.0 / span_t
    while done < samples:
        m = min(chunk, samples - done)
        u = 1.0 - rng.random(m)  # in (0, 1]
        x = scale * np.power(u, -1.0 / shape_b)
        vals = np.where(x >= 1.0, population_n * span_t / x, 0.0)
        total += float(vals.sum())
        done += m
    return total / samples
