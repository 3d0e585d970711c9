"""L^p-norm combination of per-interval unique counts.

Combining per-interval distinct counts ``C_1..C_n`` as
``(sum_j C_j ** p) ** (1 / p)`` estimates the distinct total over the whole
span.  ``p = 1`` is the plain sum (intervals see disjoint populations) and
``p = math.inf`` is the maximum (every interval re-observes one population);
real traffic sits in between.  When the cumulative series follows the
scaling law ``Q_t = Q_1 * t ** r``, the exponent ``p = 1 / r`` makes the
combination track the cumulative count exactly.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "lp_combine",
    "lp_combine_partial",
    "scaling_law",
    "geometric_mean",
]


def _as_count_array(counts: object) -> np.ndarray:
    values = getattr(counts, "counts", counts)
    xs = np.asarray(values, dtype=float)
    if xs.ndim != 1:
        raise ValueError(f"counts must be one-dimensional, got shape {xs.shape}")
    if xs.size and (not np.all(np.isfinite(xs)) or np.any(xs < 0)):
        raise ValueError("counts must be finite and non-negative")
    return xs


def _validate_exponent(p: float) -> float:
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise ValueError(f"norm exponent must be >= 1 (math.inf allowed), got {p}")
    return p


def lp_combine(counts: Sequence[float], p: float) -> float:
    """Combine per-interval counts into one distinct-total estimate.

    Parameters
    ----------
    counts : sequence of non-negative reals (or a CountSeries)
    p : norm exponent, ``1 <= p <= math.inf``

    Returns
    -------
    ``(sum_j counts[j] ** p) ** (1 / p)``, computed against the largest
    element so large exponents neither overflow nor underflow.
    """
    p = _validate_exponent(p)
    xs = _as_count_array(counts)
    if xs.size == 0:
        raise ValueError("cannot combine an empty count sequence")
    peak = float(xs.max())
    if math.isinf(p) or peak == 0.0:
        return peak
    if p == 1.0:
        return float(xs.sum())
    return peak * float(np.sum((xs / peak) ** p)) ** (1.0 / p)


def lp_combine_partial(partial: float, counts: Sequence[float], p: float) -> float:
    """Extend a previous :func:`lp_combine` result with further intervals.

    ``lp_combine_partial(lp_combine(a, p), b, p)`` equals
    ``lp_combine(a + b, p)``, so long series can be folded incrementally.
    An empty extension returns ``partial`` unchanged.
    """
    p = _validate_exponent(p)
    partial = float(partial)
    if not math.isfinite(partial) or partial < 0:
        raise ValueError(f"partial combination must be finite and non-negative, got {partial}")
    xs = _as_count_array(counts)
    if xs.size == 0:
        return partial
    peak = max(float(xs.max()), partial)
    if math.isinf(p) or peak == 0.0:
        return peak
    if p == 1.0:
        return partial + float(xs.sum())
    total = (partial / peak) ** p + float(np.sum((xs / peak) ** p))
    return peak * total ** (1.0 / p)


def scaling_law(c1: float, r: float, t: float) -> float:
    """Expected distinct total over ``t`` intervals: ``c1 * t ** r``.

    ``c1`` is the expected single-interval count, ``r`` the fractal dimension
    of the count series (``r = 1/p``), and ``t`` the span in intervals.
    """
    c1 = float(c1)
    r = float(r)
    t = float(t)
    if not math.isfinite(c1) or c1 <= 0:
        raise ValueError(f"single-interval count must be positive, got {c1}")
    if not 0.0 < r <= 1.0:
        raise ValueError(f"dimension must lie in (0, 1], got {r}")
    if not math.isfinite(t) or t < 1.0:
        raise ValueError(f"span must be at least one interval, got {t}")
    return c1 * t**r


def geometric_mean(values: Iterable[float]) -> float:
    """Geometric mean of the positive entries of ``values``.

    Zero entries are ignored so a quiet interval does not collapse the mean;
    raises if no positive entries remain.
    """
    xs = _as_count_array(values)
    xs = xs[xs > 0]
    if xs.size == 0:
        raise ValueError("geometric mean needs at least one positive value")
    return float(np.exp(np.mean(np.log(xs))))
