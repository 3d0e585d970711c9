"""Interval-indexed unique-count series, event records, and counts CSV I/O.

Interval indices are 1-based.  Interval ``j`` of a timeline with origin ``o``
and width ``w`` covers the half-open span ``[o + (j - 1) * w, o + j * w)``;
a timestamp that falls exactly on a boundary belongs to the later interval.
Counts are stored as tuples so series values are immutable and compare by
value.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from typing import Iterable, NamedTuple, TextIO


class EventRecord(NamedTuple):
    """One observation: the time it happened and the identifier seen."""

    t: float
    id: str


def interval_index(t: float, origin: float = 0.0, width: float = 1.0) -> int:
    """Return the 1-based index of the interval containing timestamp ``t``.

    The index is computed so that it is exactly consistent with boundaries
    obtained by multiplying the width: ``origin + k * width <= t`` holds for
    the returned ``k = index - 1`` and fails for ``k = index``.  This guards
    against ``floor((t - origin) / width)`` landing one interval off when the
    division rounds across a boundary.
    """
    if width <= 0 or not math.isfinite(width):
        raise ValueError(f"interval width must be positive and finite, got {width}")
    d = t - origin
    k = math.floor(d / width)
    while d < k * width:
        k -= 1
    while d >= (k + 1) * width:
        k += 1
    return k + 1


@dataclass(frozen=True)
class CountSeries:
    """Per-interval distinct-identifier counts ``C_m .. C_n``.

    ``start_index`` is the 1-based index ``m`` of the first interval and
    ``width`` the interval width in timestamp units.
    """

    counts: tuple[float, ...]
    start_index: int = 1
    width: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "counts", tuple(float(c) for c in self.counts))
        if self.width <= 0 or not math.isfinite(self.width):
            raise ValueError(f"interval width must be positive and finite, got {self.width}")
        for c in self.counts:
            if not math.isfinite(c) or c < 0:
                raise ValueError(f"interval counts must be finite and non-negative, got {c}")

    def __len__(self) -> int:
        return len(self.counts)

    @property
    def end_index(self) -> int:
        return self.start_index + len(self.counts) - 1


@dataclass(frozen=True)
class CumulativeSeries:
    """Running distinct totals ``Q_m .. Q_n`` aligned with a CountSeries."""

    cumulative: tuple[float, ...]
    start_index: int = 1
    width: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "cumulative", tuple(float(q) for q in self.cumulative)
        )
        if self.width <= 0 or not math.isfinite(self.width):
            raise ValueError(f"interval width must be positive and finite, got {self.width}")
        prev = 0.0
        for q in self.cumulative:
            if not math.isfinite(q) or q < 0:
                raise ValueError(f"cumulative counts must be finite and non-negative, got {q}")
            if q < prev:
                raise ValueError("cumulative counts must be non-decreasing")
            prev = q

    def __len__(self) -> int:
        return len(self.cumulative)

    @property
    def end_index(self) -> int:
        return self.start_index + len(self.cumulative) - 1


def validate_pair(counts: CountSeries, cumulative: CumulativeSeries) -> None:
    """Check that an interval/cumulative series pair is mutually consistent.

    The pair must be aligned, start together (``Q_m == C_m``), and satisfy
    ``max(C_m..C_j) <= Q_j <= sum(C_m..C_j)`` for every ``j`` (a running
    distinct total can never undercut its largest interval nor exceed the
    interval sum).
    """
    if len(counts) != len(cumulative):
        raise ValueError(
            f"series lengths differ: {len(counts)} counts vs {len(cumulative)} cumulative"
        )
    if counts.start_index != cumulative.start_index:
        raise ValueError("series start indices differ")
    if len(counts) == 0:
        return
    if cumulative.cumulative[0] != counts.counts[0]:
        raise ValueError("first cumulative value must equal the first interval count")
    running_max = 0.0
    running_sum = 0.0
    prev_q = 0.0
    for c, q in zip(counts.counts, cumulative.cumulative):
        running_max = max(running_max, c)
        running_sum += c
        if q - prev_q > c:
            raise ValueError("cumulative increment exceeds the interval count")
        if not (running_max <= q <= running_sum):
            raise ValueError("cumulative count violates the max/sum sandwich")
        prev_q = q


COUNTS_CSV_HEADER = ("interval", "count", "cumulative")


def _format_number(x: float) -> str:
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


def write_counts_csv(
    sink: TextIO, counts: CountSeries, cumulative: CumulativeSeries
) -> None:
    """Write an aligned series pair as ``interval,count,cumulative`` rows."""
    if len(counts) != len(cumulative) or counts.start_index != cumulative.start_index:
        raise ValueError("counts and cumulative series are not aligned")
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(COUNTS_CSV_HEADER)
    for offset, (c, q) in enumerate(zip(counts.counts, cumulative.cumulative)):
        writer.writerow(
            (counts.start_index + offset, _format_number(c), _format_number(q))
        )


def read_counts_csv(
    source: str | os.PathLike | Iterable[str],
) -> tuple[CountSeries, CumulativeSeries]:
    """Read an ``interval,count,cumulative`` file back into a series pair.

    ``source`` may be a path or an open stream of lines.  Interval width is
    not stored in the schema, so the returned series carry the default width
    of 1.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8", newline="") as handle:
            return read_counts_csv(handle)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError("counts CSV is empty (missing header)") from None
    if tuple(h.strip().lower() for h in header) != COUNTS_CSV_HEADER:
        raise ValueError(
            f"counts CSV header must be {','.join(COUNTS_CSV_HEADER)!r}, got {header!r}"
        )
    indices: list[int] = []
    counts: list[float] = []
    cumulative: list[float] = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ValueError(f"line {lineno}: expected 3 columns, got {len(row)}")
        try:
            indices.append(int(row[0]))
            counts.append(float(row[1]))
            cumulative.append(float(row[2]))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if not indices:
        return CountSeries(()), CumulativeSeries(())
    start = indices[0]
    if indices != list(range(start, start + len(indices))):
        raise ValueError("interval column must be consecutive integers")
    return (
        CountSeries(tuple(counts), start_index=start),
        CumulativeSeries(tuple(cumulative), start_index=start),
    )
