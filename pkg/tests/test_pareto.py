"""Unit tests for the heavy-tailed lifetime model."""

import numpy as np
import pytest
from scipy import integrate, stats

from reachnorm import (
    ParetoLifetimeModel,
    expected_count,
    expected_replacements,
    lifetime_cdf,
    lifetime_pdf,
    sample_lifetime,
)

HALF = ParetoLifetimeModel(scale_a=1.0, shape_b=0.5, population_n=1000)


# ---------------------------------------------------------------------------
# model validation
# ---------------------------------------------------------------------------


def test_model_exposes_dimension():
    assert HALF.dimension_r == pytest.approx(0.5, rel=1e-15)
    assert ParetoLifetimeModel(0.01, 0.2, 10).dimension_r == pytest.approx(0.8)


def test_model_rejects_bad_parameters():
    with pytest.raises(ValueError):
        ParetoLifetimeModel(scale_a=0.0, shape_b=0.5, population_n=10)
    with pytest.raises(ValueError):
        ParetoLifetimeModel(scale_a=1.0, shape_b=0.0, population_n=10)
    with pytest.raises(ValueError):
        ParetoLifetimeModel(scale_a=1.0, shape_b=1.0, population_n=10)
    with pytest.raises(ValueError):
        ParetoLifetimeModel(scale_a=1.0, shape_b=0.5, population_n=0)
    with pytest.raises((TypeError, ValueError)):
        ParetoLifetimeModel(scale_a=1.0, shape_b=0.5, population_n=1.5)
    with pytest.raises((TypeError, ValueError)):
        ParetoLifetimeModel(scale_a=1.0, shape_b=0.5, population_n=True)


# ---------------------------------------------------------------------------
# density
# ---------------------------------------------------------------------------


def test_pdf_pinned_values():
    assert lifetime_pdf(HALF, 1.0) == pytest.approx(0.5, rel=1e-15)
    assert lifetime_pdf(HALF, 4.0) == pytest.approx(0.0625, rel=1e-15)


def test_pdf_vectorized():
    out = lifetime_pdf(HALF, np.array([1.0, 4.0]))
    assert out == pytest.approx([0.5, 0.0625], rel=1e-15)


def test_pdf_below_scale_rejected():
    with pytest.raises(ValueError):
        lifetime_pdf(HALF, 0.5)
    with pytest.raises(ValueError):
        lifetime_pdf(HALF, np.array([2.0, 0.5]))


def test_pdf_integrates_to_one():
    # integrate decade by decade: one adaptive pass over eight orders of
    # magnitude cannot see the mass concentrated near the scale point
    edges = [10.0**k for k in range(9)]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        piece, _ = integrate.quad(lambda x: lifetime_pdf(HALF, x), lo, hi)
        total += piece
    assert total == pytest.approx(1.0, abs=1e-3)


def test_pdf_matches_cdf_derivative():
    for x in (1.5, 4.0, 100.0):
        h = 3e-6 * x
        deriv = (lifetime_cdf(HALF, x + h) - lifetime_cdf(HALF, x - h)) / (2.0 * h)
        assert deriv == pytest.approx(lifetime_pdf(HALF, x), rel=1e-6)


# ---------------------------------------------------------------------------
# distribution function and sampling
# ---------------------------------------------------------------------------


def test_cdf_pinned_values():
    assert lifetime_cdf(HALF, 1.0) == 0.0
    assert lifetime_cdf(HALF, 16.0) == pytest.approx(0.75, rel=1e-15)


def test_cdf_below_scale_rejected():
    with pytest.raises(ValueError):
        lifetime_cdf(HALF, 0.999)


def test_sample_pinned_values():
    assert sample_lifetime(HALF, 1.0) == pytest.approx(1.0, rel=1e-15)
    assert sample_lifetime(HALF, 0.25) == pytest.approx(16.0, rel=1e-15)


def test_sample_cdf_round_trip():
    for u in (0.1, 0.5, 0.9):
        x = sample_lifetime(HALF, u)
        # u is the upper-tail coordinate: CDF(x) = 1 - u
        assert lifetime_cdf(HALF, x) == pytest.approx(1.0 - u, rel=1e-12)


def test_sample_rejects_out_of_range():
    for bad in (0.0, -0.1, 1.0001):
        with pytest.raises(ValueError):
            sample_lifetime(HALF, bad)
    with pytest.raises(ValueError):
        sample_lifetime(HALF, np.array([0.5, 0.0]))


def test_sample_vectorized_matches_scalar():
    us = np.array([0.25, 0.5, 1.0])
    out = sample_lifetime(HALF, us)
    assert out == pytest.approx([sample_lifetime(HALF, u) for u in us])


def test_sample_distribution_ks():
    rng = np.random.default_rng(123)
    u = 1.0 - rng.random(10**6)  # in (0, 1]
    xs = sample_lifetime(HALF, u)
    result = stats.kstest(xs, lambda x: lifetime_cdf(HALF, x))
    assert result.statistic < 0.002


def test_heavy_tail_sample_mean_grows():
    # shape below one has no finite mean: bigger samples keep finding
    # bigger lifetimes, so the running mean drifts upward.
    ratios = []
    for seed in range(5):
        rng = np.random.default_rng(seed)
        u = 1.0 - rng.random(10**6)
        xs = sample_lifetime(HALF, u)
        small = xs[:1000].mean()
        ratios.append(xs.mean() / small)
    assert np.median(ratios) > 3.0


# ---------------------------------------------------------------------------
# closed-form expectations
# ---------------------------------------------------------------------------


def test_expected_replacements_pinned_values():
    assert expected_replacements(HALF, 4.0) == pytest.approx(2000.0 / 3.0, rel=1e-12)
    assert expected_replacements(HALF, 1.0) == pytest.approx(1000.0 / 3.0, rel=1e-12)


def test_expected_count_pinned_values():
    assert expected_count(HALF, 1.0) == pytest.approx(1000.0, rel=1e-15)
    assert expected_count(HALF, 4.0) == pytest.approx(2000.0, rel=1e-15)


def test_count_replacement_ratio_closed_form():
    for shape_b in np.arange(0.1, 0.95, 0.1):
        model = ParetoLifetimeModel(1.0, float(shape_b), 500)
        r = model.dimension_r
        for t in (1.0, 3.0, 25.0):
            ratio = expected_count(model, t) / expected_replacements(model, t)
            assert ratio == pytest.approx((2.0 - r) / (1.0 - r), rel=1e-12)


def test_expectations_reject_spans_below_one():
    with pytest.raises(ValueError):
        expected_replacements(HALF, 0.99)
    with pytest.raises(ValueError):
        expected_count(HALF, 0.0)
