"""Unit tests for interval indexing, series containers, and counts CSV I/O."""

import io
import math

import pytest

from reachnorm import (
    CountSeries,
    CumulativeSeries,
    interval_index,
    read_counts_csv,
    validate_pair,
    write_counts_csv,
)

# ---------------------------------------------------------------------------
# interval_index
# ---------------------------------------------------------------------------


def test_interval_index_unit_width():
    assert interval_index(0.0) == 1
    assert interval_index(0.999) == 1
    assert interval_index(1.0) == 2  # boundary belongs to the later interval
    assert interval_index(41.0) == 42


def test_interval_index_wide_intervals():
    assert interval_index(0.0, width=7.0) == 1
    assert interval_index(6.999, width=7.0) == 1
    assert interval_index(7.0, width=7.0) == 2
    assert interval_index(13.9, width=7.0) == 2


def test_interval_index_origin_shift():
    assert interval_index(10.0, origin=10.0) == 1
    assert interval_index(9.9, origin=10.0) == 0
    assert interval_index(17.0, origin=10.0, width=7.0) == 2


def test_interval_index_exact_at_awkward_boundaries():
    # just below a boundary must stay in the earlier interval even when
    # floor(t / width) would round across it
    width = 7.0
    for j in (1, 3, 10, 1000):
        below = math.nextafter(j * width, 0.0)
        assert interval_index(below, width=width) == j
        assert interval_index(j * width, width=width) == j + 1


def test_interval_index_tenth_width_boundaries():
    # 0.1 is not exactly representable; indices must still be consistent
    # with accumulated boundaries
    width = 0.1
    for j in range(1, 200):
        t = j * width
        idx = interval_index(t, width=width)
        assert idx in (j, j + 1)
        # consistency: the returned interval really contains t
        assert (idx - 1) * width <= t < idx * width


def test_interval_index_rejects_bad_width():
    with pytest.raises(ValueError):
        interval_index(1.0, width=0.0)
    with pytest.raises(ValueError):
        interval_index(1.0, width=-2.0)
    with pytest.raises(ValueError):
        interval_index(1.0, width=math.inf)


# ---------------------------------------------------------------------------
# series containers
# ---------------------------------------------------------------------------


def test_count_series_basics():
    s = CountSeries(counts=(3, 4, 5))
    assert s.counts == (3.0, 4.0, 5.0)
    assert len(s) == 3
    assert s.start_index == 1
    assert s.end_index == 3
    assert CountSeries(counts=(1.0,), start_index=5).end_index == 5


def test_count_series_rejects_bad_values():
    with pytest.raises(ValueError):
        CountSeries(counts=(1.0, -1.0))
    with pytest.raises(ValueError):
        CountSeries(counts=(math.nan,))
    with pytest.raises(ValueError):
        CountSeries(counts=(1.0,), width=0.0)


def test_cumulative_series_monotonicity_enforced():
    CumulativeSeries(cumulative=(1.0, 1.0, 2.0))  # flat stretches allowed
    with pytest.raises(ValueError):
        CumulativeSeries(cumulative=(2.0, 1.0))


def test_series_compare_by_value():
    assert CountSeries(counts=(1, 2)) == CountSeries(counts=(1.0, 2.0))
    assert CountSeries(counts=(1, 2)) != CountSeries(counts=(1, 2), start_index=2)


# ---------------------------------------------------------------------------
# validate_pair
# ---------------------------------------------------------------------------


def test_validate_pair_accepts_consistent_data():
    validate_pair(
        CountSeries(counts=(2, 2, 1)),
        CumulativeSeries(cumulative=(2, 3, 4)),
    )


def test_validate_pair_rejects_misalignment():
    with pytest.raises(ValueError):
        validate_pair(CountSeries(counts=(1, 2)), CumulativeSeries(cumulative=(1,)))
    with pytest.raises(ValueError):
        validate_pair(
            CountSeries(counts=(1,), start_index=1),
            CumulativeSeries(cumulative=(1,), start_index=2),
        )


def test_validate_pair_rejects_bad_first_value():
    with pytest.raises(ValueError):
        validate_pair(CountSeries(counts=(2,)), CumulativeSeries(cumulative=(3,)))


def test_validate_pair_rejects_increment_above_count():
    # second interval adds 3 new ids but only counted 2 distinct
    with pytest.raises(ValueError):
        validate_pair(
            CountSeries(counts=(2, 2)), CumulativeSeries(cumulative=(2, 5))
        )


def test_validate_pair_rejects_sandwich_violations():
    # cumulative below the largest single interval
    with pytest.raises(ValueError):
        validate_pair(
            CountSeries(counts=(5, 9)), CumulativeSeries(cumulative=(5, 8))
        )


def test_validate_pair_empty_ok():
    validate_pair(CountSeries(counts=()), CumulativeSeries(cumulative=()))


# ---------------------------------------------------------------------------
# counts CSV round trip
# ---------------------------------------------------------------------------


def test_counts_csv_round_trip_integers():
    counts = CountSeries(counts=(2, 2, 1))
    cumulative = CumulativeSeries(cumulative=(2, 3, 4))
    buf = io.StringIO()
    write_counts_csv(buf, counts, cumulative)
    buf.seek(0)
    back_c, back_q = read_counts_csv(buf)
    assert back_c == counts
    assert back_q == cumulative


def test_counts_csv_round_trip_floats_exact():
    counts = CountSeries(counts=(0.1, 2.25, 3.0))
    cumulative = CumulativeSeries(cumulative=(0.1, 2.3, 5.25))
    buf = io.StringIO()
    write_counts_csv(buf, counts, cumulative)
    buf.seek(0)
    back_c, back_q = read_counts_csv(buf)
    assert back_c.counts == counts.counts  # repr round-trips floats exactly
    assert back_q.cumulative == cumulative.cumulative


def test_counts_csv_integer_values_written_without_decimal():
    buf = io.StringIO()
    write_counts_csv(
        buf, CountSeries(counts=(2.0,)), CumulativeSeries(cumulative=(2.0,))
    )
    assert buf.getvalue() == "interval,count,cumulative\n1,2,2\n"


def test_counts_csv_preserves_start_index():
    counts = CountSeries(counts=(4, 1), start_index=3)
    cumulative = CumulativeSeries(cumulative=(4, 5), start_index=3)
    buf = io.StringIO()
    write_counts_csv(buf, counts, cumulative)
    buf.seek(0)
    back_c, back_q = read_counts_csv(buf)
    assert back_c.start_index == 3
    assert back_q.start_index == 3


def test_counts_csv_header_only_reads_empty():
    back_c, back_q = read_counts_csv(io.StringIO("interval,count,cumulative\n"))
    assert len(back_c) == 0
    assert len(back_q) == 0


def test_counts_csv_missing_header_rejected():
    with pytest.raises(ValueError, match="header"):
        read_counts_csv(io.StringIO("1,2,2\n"))
    with pytest.raises(ValueError, match="empty"):
        read_counts_csv(io.StringIO(""))


def test_counts_csv_bad_row_reports_line_number():
    text = "interval,count,cumulative\n1,2,2\n2,oops,3\n"
    with pytest.raises(ValueError, match="line 3"):
        read_counts_csv(io.StringIO(text))
    text = "interval,count,cumulative\n1,2\n"
    with pytest.raises(ValueError, match="line 2"):
        read_counts_csv(io.StringIO(text))


def test_counts_csv_nonconsecutive_intervals_rejected():
    text = "interval,count,cumulative\n1,2,2\n3,1,3\n"
    with pytest.raises(ValueError, match="consecutive"):
        read_counts_csv(io.StringIO(text))


def test_counts_csv_reads_from_path(tmp_path):
    target = tmp_path / "counts.csv"
    counts = CountSeries(counts=(1, 2))
    cumulative = CumulativeSeries(cumulative=(1, 3))
    with open(target, "w", encoding="utf-8", newline="") as handle:
        write_counts_csv(handle, counts, cumulative)
    back_c, back_q = read_counts_csv(target)
    assert back_c == counts
    assert back_q == cumulative


def test_write_counts_csv_rejects_misaligned_pair():
    with pytest.raises(ValueError):
        write_counts_csv(
            io.StringIO(),
            CountSeries(counts=(1, 2)),
            CumulativeSeries(cumulative=(1,)),
        )
