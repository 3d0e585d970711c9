"""Event-log ingestion into exact per-interval distinct counts.

Reads event records — a timestamp plus an opaque identifier — from CSV or
JSONL, buckets them into fixed-width intervals, and produces the paired
series the rest of the library consumes: per-interval distinct counts and
cumulative distinct counts over the growing span.  Counting is exact (hashed
id sets, no sketches) because the downstream exponent fit is sensitive to
cardinality error.

Formats
-------
* CSV: header ``timestamp,id``; the timestamp is either a non-negative
  decimal in plain time units or an ISO-8601 instant.  ISO instants are
  mapped to fractional days since 1970-01-01T00:00Z, so ``interval_width=1``
  buckets by UTC day and ``interval_width=7`` by 7-day blocks.
* JSONL: one object per line with a numeric ``t`` and a string ``id``.

Interval indexing is positional: interval 1 is the bucket containing the
earliest record, bucket edges are anchored at ``origin`` (default 0), and a
record exactly on an edge belongs to the later bucket.
"""

from __future__ import annotations

import csv
import json
import math
import os
from datetime import datetime, timezone
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence

from .series import (
    CountSeries,
    CumulativeSeries,
    EventRecord,
    interval_index,
)

__all__ = [
    "EventParseError",
    "parse_timestamp",
    "read_events",
    "read_events_csv",
    "read_events_jsonl",
    "write_events_csv",
    "write_events_jsonl",
    "ingest",
    "rebucket",
    "EVENTS_CSV_HEADER",
]

EVENTS_CSV_HEADER = ("timestamp", "id")


class EventParseError(ValueError):
    """A malformed event record, carrying the 1-based source line number."""

    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


_SECONDS_PER_DAY = 86400.0


def parse_timestamp(text: str) -> float:
    """Parse a timestamp field: plain non-negative number or ISO-8601 instant.

    ISO instants become fractional days since the Unix epoch (UTC); a naive
    instant is taken as UTC.
    """
    text = text.strip()
    if not text:
        raise ValueError("empty timestamp")
    try:
        value = float(text)
    except ValueError:
        try:
            moment = datetime.fromisoformat(text.replace("Z", "+00:00"))
        except ValueError:
            raise ValueError(f"timestamp {text!r} is neither a number nor ISO-8601") from None
        if moment.tzinfo is None:
            moment = moment.replace(tzinfo=timezone.utc)
        return moment.timestamp() / _SECONDS_PER_DAY
    if not math.isfinite(value) or value < 0:
        raise ValueError(f"numeric timestamp must be finite and non-negative, got {text!r}")
    return value


def _skip_or_raise(
    strict: bool, skipped: list[int], line_number: int, reason: str
) -> None:
    if strict:
        raise EventParseError(line_number, reason)
    skipped.append(line_number)


def read_events_csv(
    source: Iterable[str], strict: bool = True
) -> tuple[list[EventRecord], int]:
    """Read ``timestamp,id`` CSV lines into records.

    Returns ``(records, skipped)``.  In strict mode any malformed record
    raises :class:`EventParseError` with its line number; in lenient mode it
    is skipped and counted.  A missing or wrong header is an error in both
    modes.
    """
    records: list[EventRecord] = []
    skipped: list[int] = []
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None:
        return records, 0
    if tuple(cell.strip() for cell in header) != EVENTS_CSV_HEADER:
        raise EventParseError(1, f"expected header {','.join(EVENTS_CSV_HEADER)!r}, got {header!r}")
    for row in reader:
        line_number = reader.line_num
        if not row:
            continue
        if len(row) != 2:
            _skip_or_raise(strict, skipped, line_number, f"expected 2 fields, got {len(row)}")
            continue
        raw_t, raw_id = row
        try:
            t = parse_timestamp(raw_t)
        except ValueError as exc:
            _skip_or_raise(strict, skipped, line_number, str(exc))
            continue
        if not raw_id:
            _skip_or_raise(strict, skipped, line_number, "empty id")
            continue
        records.append(EventRecord(t, raw_id))
    return records, len(skipped)


def read_events_jsonl(
    source: Iterable[str], strict: bool = True
) -> tuple[list[EventRecord], int]:
    """Read JSONL event lines (numeric ``t``, string ``id``) into records."""
    records: list[EventRecord] = []
    skipped: list[int] = []
    for line_number, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            _skip_or_raise(strict, skipped, line_number, f"invalid JSON: {exc}")
            continue
        if not isinstance(obj, dict):
            _skip_or_raise(strict, skipped, line_number, "record is not an object")
            continue
        t = obj.get("t")
        rid = obj.get("id")
        if isinstance(t, bool) or not isinstance(t, (int, float)) or not math.isfinite(t) or t < 0:
            _skip_or_raise(
                strict, skipped, line_number, "field 't' must be a finite non-negative number"
            )
            continue
        if not isinstance(rid, str) or not rid:
            _skip_or_raise(strict, skipped, line_number, "field 'id' must be a non-empty string")
            continue
        records.append(EventRecord(float(t), rid))
    return records, len(skipped)


def _detect_format(path: Path) -> str:
    suffix = path.suffix.lower()
    if suffix == ".csv":
        return "csv"
    if suffix in (".jsonl", ".ndjson", ".json"):
        return "jsonl"
    raise ValueError(
        f"cannot infer event format from {path.name!r}; pass fmt='csv' or fmt='jsonl'"
    )


def read_events(
    source: str | os.PathLike | IO[str],
    fmt: str = "auto",
    strict: bool = True,
) -> tuple[list[EventRecord], int]:
    """Read events from a path or open text stream, dispatching on format."""
    if fmt not in ("auto", "csv", "jsonl"):
        raise ValueError(f"unknown event format {fmt!r}")
    if isinstance(source, (str, os.PathLike)):
        path = Path(source)
        if fmt == "auto":
            fmt = _detect_format(path)
        with open(path, "r", encoding="utf-8", newline="") as handle:
            return read_events(handle, fmt=fmt, strict=strict)
    if fmt == "auto":
        raise ValueError("format auto-detection needs a file path; pass fmt explicitly")
    if fmt == "csv":
        return read_events_csv(source, strict=strict)
    return read_events_jsonl(source, strict=strict)


def _iter_pairs(records: Iterable) -> Iterator[tuple[float, str]]:
    for rec in records:
        t, rid = rec[0], rec[1]
        yield float(t), str(rid)


def write_events_csv(sink: IO[str], records: Iterable) -> int:
    """Write records as ``timestamp,id`` CSV; returns the record count."""
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(EVENTS_CSV_HEADER)
    n = 0
    for t, rid in _iter_pairs(records):
        writer.writerow((repr(t), rid))
        n += 1
    return n


def write_events_jsonl(sink: IO[str], records: Iterable) -> int:
    """Write records as JSONL objects ``{"t": ..., "id": ...}``; returns the count."""
    n = 0
    for t, rid in _iter_pairs(records):
        sink.write(json.dumps({"t": t, "id": rid}, separators=(",", ":")))
        sink.write("\n")
        n += 1
    return n


def ingest(
    records: Iterable,
    interval_width: float = 1.0,
    origin: float = 0.0,
) -> tuple[CountSeries, CumulativeSeries]:
    """Bucket event records into exact distinct-count series.

    One pass over the records (order irrelevant): ``counts[j]`` is the number
    of distinct ids with at least one event in interval ``j`` and
    ``cumulative[j]`` the number of distinct ids seen in intervals up to and
    including ``j``.  The returned series start at index 1 (the bucket of the
    earliest record) and cover every bucket through the latest record; empty
    interior buckets yield zero counts.  Memory is proportional to the number
    of distinct (id, interval) pairs.
    """
    width = float(interval_width)
    if not math.isfinite(width) or width <= 0:
        raise ValueError(f"interval width must be positive, got {interval_width}")
    origin = float(origin)
    if not math.isfinite(origin):
        raise ValueError(f"origin must be finite, got {origin}")

    seen_pairs: set[tuple[str, int]] = set()
    first_bucket: dict[str, int] = {}
    for t, rid in _iter_pairs(records):
        if not math.isfinite(t):
            raise ValueError(f"timestamp must be finite, got {t}")
        if not rid:
            raise ValueError("id must be non-empty")
        bucket = interval_index(t, origin=origin, width=width)
        seen_pairs.add((rid, bucket))
        prior = first_bucket.get(rid)
        if prior is None or bucket < prior:
            first_bucket[rid] = bucket

    if not seen_pairs:
        return (
            CountSeries((), start_index=1, width=width),
            CumulativeSeries((), start_index=1, width=width),
        )

    low = min(b for _, b in seen_pairs)
    high = max(b for _, b in seen_pairs)
    span = high - low + 1
    counts = [0] * span
    for _, bucket in seen_pairs:
        counts[bucket - low] += 1
    new_ids = [0] * span
    for bucket in first_bucket.values():
        new_ids[bucket - low] += 1
    cumulative = []
    running = 0
    for inc in new_ids:
        running += inc
        cumulative.append(running)
    return (
        CountSeries(tuple(counts), start_index=1, width=width),
        CumulativeSeries(tuple(cumulative), start_index=1, width=width),
    )


def rebucket(
    records: Sequence,
    new_width: float,
    base_width: float = 1.0,
    origin: float = 0.0,
) -> tuple[CountSeries, CumulativeSeries]:
    """Re-aggregate raw events into wider intervals.

    ``new_width`` must be a positive integer multiple of ``base_width`` (the
    resolution the events were originally bucketed at), so wide buckets align
    with narrow ones.  Note the wide count is NOT the sum of the narrow
    counts it covers — an id active in several narrow buckets is one distinct
    id in the wide bucket.
    """
    new_width = float(new_width)
    base_width = float(base_width)
    if not math.isfinite(base_width) or base_width <= 0:
        raise ValueError(f"base width must be positive, got {base_width}")
    if not math.isfinite(new_width) or new_width <= 0:
        raise ValueError(f"new width must be positive, got {new_width}")
    multiple = new_width / base_width
    if abs(multiple - round(multiple)) > 1e-9 or round(multiple) < 1:
        raise ValueError(
            f"new width {new_width} is not a positive integer multiple of {base_width}"
        )
    return ingest(records, interval_width=new_width, origin=origin)
