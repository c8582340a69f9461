from datetime import datetime, timedelta

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diffsim import CalendarEntry, WeeklyCalendar, extract_candidates, granule_of
from diffsim.calendars import EmptyCalendarError, ceil_to_second, stamps_to_candidates

from conftest import ts


class FakeEvent:
    def __init__(self, start, end, activity="act"):
        self.start = start
        self.end = end
        self.activity = activity


class TestGranuleOf:
    def test_saturday_8_12_maps_to_quarter_hour_granule(self):
        # Saturday 2022-01-01 08:12, 15-minute granules
        entry = granule_of(datetime(2022, 1, 1, 8, 12), 15)
        assert entry == CalendarEntry.parse("Saturday", "08:00:00", "08:15:00")

    def test_midnight_lands_in_first_granule(self):
        entry = granule_of(ts(2, 0, 0), 60)
        assert entry == CalendarEntry.parse("Wednesday", "00:00:00", "01:00:00")

    def test_last_second_of_monday_lands_in_last_granule(self):
        entry = granule_of(ts(0, 23, 59, 59), 60)
        assert entry == CalendarEntry(0, 23 * 3600, 24 * 3600)

    def test_granule_must_divide_day(self):
        with pytest.raises(ValueError):
            granule_of(ts(), 7)

    @given(
        st.integers(min_value=0, max_value=7 * 86400 - 1),
        st.sampled_from([15, 30, 60, 120, 1440]),
    )
    def test_partition_property(self, offset, n):
        t = ts() + timedelta(seconds=offset)
        entry = granule_of(t, n)
        day_seconds = t.hour * 3600 + t.minute * 60 + t.second
        assert entry.weekday == t.weekday()
        assert entry.begin <= day_seconds < entry.end
        assert entry.end - entry.begin == n * 60
        assert entry.begin % (n * 60) == 0


class TestCandidates:
    def test_two_stamps_in_different_granules(self):
        omega = extract_candidates([FakeEvent(ts(0, 8, 5), ts(0, 9, 5))], 60)
        assert omega.counts == {
            CalendarEntry(0, 8 * 3600, 9 * 3600): 1,
            CalendarEntry(0, 9 * 3600, 10 * 3600): 1,
        }

    def test_both_stamps_in_one_granule_count_twice(self):
        omega = extract_candidates([FakeEvent(ts(0, 8, 5), ts(0, 8, 50))], 60)
        assert omega.counts == {CalendarEntry(0, 8 * 3600, 9 * 3600): 2}

    def test_ten_events_in_one_hour_give_multiplicity_twenty(self):
        events = [FakeEvent(ts(0, 8, 5), ts(0, 8, 50)) for _ in range(10)]
        omega = extract_candidates(events, 60)
        assert omega.counts == {CalendarEntry(0, 8 * 3600, 9 * 3600): 20}

    def test_activity_dates_tracked_per_granule(self):
        events = [
            FakeEvent(ts(0, 8, 10), ts(0, 8, 20), "a"),
            FakeEvent(ts(7, 8, 10), ts(7, 8, 20), "a"),  # next Monday
        ]
        omega = extract_candidates(events, 60)
        entry = CalendarEntry(0, 8 * 3600, 9 * 3600)
        assert len(omega.activity_entry_dates["a"][entry]) == 2
        assert len(omega.weekday_dates("a", 0)) == 2

    def test_bare_stamps_count_once(self):
        omega = stamps_to_candidates([ts(0, 8, 5), ts(0, 8, 7)], 60)
        assert omega.total == 2


class TestNextAvailable:
    def test_inside_interval_is_identity(self, workweek):
        t = ts(0, 10, 30)
        assert workweek.next_available(t) == t

    def test_saturday_advances_to_monday_morning(self, workweek):
        assert workweek.next_available(ts(5, 10, 0)) == ts(7, 9, 0)

    def test_before_opening_advances_same_day(self, workweek):
        assert workweek.next_available(ts(1, 6, 0)) == ts(1, 9, 0)

    def test_after_closing_advances_next_day(self, workweek):
        assert workweek.next_available(ts(0, 17, 0)) == ts(1, 9, 0)

    def test_empty_calendar_errors(self):
        with pytest.raises(EmptyCalendarError):
            WeeklyCalendar().next_available(ts())


class TestInCalendarDuration:
    def test_full_time_is_plain_difference(self):
        cal = WeeklyCalendar.full_time()
        assert cal.in_calendar_duration(ts(0, 1, 0), ts(2, 5, 0)) == 2 * 86400 + 4 * 3600

    def test_weekend_gap_counts_only_working_hours(self, workweek):
        # Friday 16:00 .. next Monday 10:00 -> 1h Friday + 1h Monday
        assert workweek.in_calendar_duration(ts(4, 16, 0), ts(7, 10, 0)) == 7200

    def test_zero_length_interval(self, workweek):
        assert workweek.in_calendar_duration(ts(0, 10, 0), ts(0, 10, 0)) == 0

    def test_reversed_interval_rejected(self, workweek):
        with pytest.raises(ValueError):
            workweek.in_calendar_duration(ts(0, 11, 0), ts(0, 10, 0))


class TestCompletion:
    def test_full_time_adds_duration(self):
        cal = WeeklyCalendar.full_time()
        assert cal.idle_processing_completion(ts(0, 10, 0), 12345) == ts(0, 10, 0) + timedelta(
            seconds=12345
        )

    def test_friday_work_spills_into_monday(self, workweek):
        assert workweek.idle_processing_completion(ts(4, 16, 0), 7200) == ts(7, 10, 0)

    def test_zero_duration_returns_start(self, workweek):
        assert workweek.idle_processing_completion(ts(0, 10, 0), 0) == ts(0, 10, 0)

    def test_completion_at_interval_end_stays_at_end(self, workweek):
        # exactly one hour left on Friday: finish at 17:00, not Monday 09:00
        assert workweek.idle_processing_completion(ts(4, 16, 0), 3600) == ts(4, 17, 0)

    def test_empty_calendar_errors(self):
        with pytest.raises(EmptyCalendarError):
            WeeklyCalendar().idle_processing_completion(ts(), 10)

    def test_multi_week_pileup(self, workweek):
        # 40h per week; 81 working hours from Monday 09:00 = 2 weeks + 1h
        done = workweek.idle_processing_completion(ts(0, 9, 0), 81 * 3600)
        assert done == ts(14, 10, 0)


entry_strategy = st.builds(
    lambda wd, slot: CalendarEntry(wd, slot * 3600, (slot + 1) * 3600),
    st.integers(0, 6),
    st.integers(0, 23),
)
calendar_strategy = st.builds(WeeklyCalendar, st.sets(entry_strategy, min_size=1, max_size=25))
instant_strategy = st.integers(min_value=0, max_value=3 * 7 * 86400).map(
    lambda s: ts() + timedelta(seconds=s)
)


class TestProperties:
    @given(calendar_strategy, instant_strategy, st.floats(min_value=0, max_value=200_000))
    @settings(max_examples=150, deadline=None)
    def test_duration_completion_duality(self, cal, t, ideal):
        start = cal.next_available(t)
        done = cal.idle_processing_completion(start, ideal)
        measured = cal.in_calendar_duration(start, done)
        assert abs(measured - ideal) < 1e-6

    @given(calendar_strategy, instant_strategy, instant_strategy)
    @settings(max_examples=100, deadline=None)
    def test_next_available_monotone_and_inside(self, cal, t1, t2):
        lo, hi = sorted([t1, t2])
        a, b = cal.next_available(lo), cal.next_available(hi)
        assert a <= b
        assert cal.contains(a) and cal.contains(b)
        assert a >= lo

    @given(st.sets(entry_strategy, min_size=1, max_size=25), instant_strategy)
    @settings(max_examples=100, deadline=None)
    def test_canonicalization_preserves_queries(self, entries, t):
        cal = WeeklyCalendar(entries)
        # rebuilding from canonical per-day entries must change nothing
        rebuilt = WeeklyCalendar(cal.entries())
        assert rebuilt == cal
        assert rebuilt.next_available(t) == cal.next_available(t)
        assert rebuilt.in_calendar_duration(t, t + timedelta(days=9)) == cal.in_calendar_duration(
            t, t + timedelta(days=9)
        )

    @given(calendar_strategy, instant_strategy, st.floats(min_value=0, max_value=100_000))
    @settings(max_examples=100, deadline=None)
    def test_completion_monotone_in_start(self, cal, t, ideal):
        later = t + timedelta(hours=3)
        d1 = cal.idle_processing_completion(t, ideal)
        d2 = cal.idle_processing_completion(later, ideal)
        assert d2 >= d1


class TestEntriesAndJson:
    def test_adjacent_granules_merge(self):
        cal = WeeklyCalendar(
            [CalendarEntry(0, 9 * 3600, 10 * 3600), CalendarEntry(0, 10 * 3600, 11 * 3600)]
        )
        assert cal.entries() == [CalendarEntry(0, 9 * 3600, 11 * 3600)]

    def test_end_of_day_bound_allowed(self):
        entry = CalendarEntry.parse("Sunday", "23:00:00", "24:00:00")
        assert WeeklyCalendar([entry]).weekly_seconds == 3600

    def test_degenerate_entry_rejected(self):
        with pytest.raises(ValueError):
            CalendarEntry(0, 3600, 3600)

    def test_json_round_trip(self, workweek):
        assert WeeklyCalendar.from_json(workweek.to_json()) == workweek

    def test_entry_json_format(self):
        entry = CalendarEntry.parse("Monday", "08:15:00", "12:00:00")
        assert entry.to_json() == {
            "weekday": "Monday",
            "beginTime": "08:15:00",
            "endTime": "12:00:00",
        }


def test_ceil_to_second():
    t = ts(0, 10, 0).replace(microsecond=250_000)
    assert ceil_to_second(t) == ts(0, 10, 0, 1) + timedelta(seconds=0)
    assert ceil_to_second(ts(0, 10, 0)) == ts(0, 10, 0)
