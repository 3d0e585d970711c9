"""Plot-data assembly and optional figure rendering.

Builds the four aligned series that summarize a count dataset against the
fitted exponent — per-interval counts, the running L^p combination, the true
cumulative counts, and the scaling-law curve anchored at the geometric mean
of the counts — as a tidy table for external tools, plus a convenience
renderer that draws them on log-log axes to an image file.
"""

from __future__ import annotations

import io
from typing import NamedTuple

from .fitting import DimensionFit
from .norms import geometric_mean, lp_combine_partial, scaling_law
from .series import CountSeries, CumulativeSeries, validate_pair

__all__ = [
    "PlotRow",
    "PLOT_CSV_HEADER",
    "plot_series_table",
    "render_figure_bytes",
]

PLOT_CSV_HEADER = ("interval", "count", "lp_combined", "cumulative", "scaling_law")


class PlotRow(NamedTuple):
    """One interval's worth of the four summary series."""

    interval: int
    count: float
    lp_combined: float
    cumulative: float
    scaling_law: float


def plot_series_table(
    counts: CountSeries, cumulative: CumulativeSeries, fit: DimensionFit
) -> tuple[PlotRow, ...]:
    """The four summary series, one row per interval.

    ``lp_combined`` folds the counts through the L^p combination at the
    fitted exponent up to each interval; ``scaling_law`` is ``G * t**r``
    with ``G`` the geometric mean of the positive counts, so its first value
    is ``G`` itself.
    """
    validate_pair(counts, cumulative)
    if not counts.counts:
        return ()
    level = geometric_mean(counts.counts)
    rows = []
    running = 0.0
    for offset, (c, q) in enumerate(zip(counts.counts, cumulative.cumulative)):
        running = lp_combine_partial(running, (c,), fit.p)
        rows.append(
            PlotRow(
                interval=counts.start_index + offset,
                count=float(c),
                lp_combined=running,
                cumulative=float(q),
                scaling_law=scaling_law(level, fit.r, offset + 1),
            )
        )
    return tuple(rows)


def render_figure_bytes(
    counts: CountSeries,
    cumulative: CumulativeSeries,
    fit: DimensionFit,
    image_format: str = "png",
    title: str | None = None,
) -> bytes:
    """Render the four series on log-log axes; returns the encoded image.

    Uses the raster-only drawing backend directly, so no display and no
    global backend configuration is involved.
    """
    from matplotlib.backends.backend_agg import FigureCanvasAgg
    from matplotlib.figure import Figure

    rows = plot_series_table(counts, cumulative, fit)
    if not rows:
        raise ValueError("cannot render an empty series")
    spans = [row.interval - counts.start_index + 1 for row in rows]

    figure = Figure(figsize=(7.0, 5.0), dpi=150)
    FigureCanvasAgg(figure)
    axes = figure.subplots()
    axes.plot(spans, [row.count for row in rows], "o", markersize=3, label="per-interval count")
    axes.plot(
        spans,
        [row.lp_combined for row in rows],
        "-",
        label=f"L^p combination (p={fit.p:.3f})",
    )
    axes.plot(spans, [row.cumulative for row in rows], "--", label="cumulative distinct")
    axes.plot(
        spans,
        [row.scaling_law for row in rows],
        ":",
        label=f"scaling law (r={fit.r:.3f})",
    )
    axes.set_xscale("log")
    axes.set_yscale("log")
    axes.set_xlabel("span (intervals)")
    axes.set_ylabel("distinct ids")
    if title:
        axes.set_title(title)
    axes.legend(loc="best", fontsize=8)
    figure.tight_layout()

    buffer = io.BytesIO()
    figure.savefig(buffer, format=image_format)
    return buffer.getvalue()
