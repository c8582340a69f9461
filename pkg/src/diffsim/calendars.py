"""Weekly availability calendars and the arithmetic the simulator leans on.

A calendar is a set of weekday x time-of-day intervals with 1-second
resolution. Internally every calendar is a canonical sorted list of
half-open intervals on the week axis (seconds since Monday 00:00:00),
which makes the three hot operations cheap: advancing a timestamp to the
next available instant, measuring in-calendar duration between two
timestamps, and walking forward until a given amount of in-calendar work
has been consumed.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from typing import Iterable

SECONDS_PER_DAY = 86_400
SECONDS_PER_WEEK = 7 * SECONDS_PER_DAY

WEEKDAY_NAMES = (
    "Monday",
    "Tuesday",
    "Wednesday",
    "Thursday",
    "Friday",
    "Saturday",
    "Sunday",
)
_WEEKDAY_INDEX = {name: i for i, name in enumerate(WEEKDAY_NAMES)}

# Monday 1970-01-05 00:00:00: reference origin so that
# (t - _REF) % SECONDS_PER_WEEK is the position of t within its week.
_REF = datetime(1970, 1, 5)


class EmptyCalendarError(ValueError):
    """Raised when an operation needs at least one availability interval."""


def refsec(t: datetime) -> float:
    """Seconds since the Monday reference origin (negative before 1970)."""
    return (t - _REF).total_seconds()


def from_refsec(s: float) -> datetime:
    return _REF + timedelta(seconds=s)


def week_position(t: datetime) -> float:
    return refsec(t) % SECONDS_PER_WEEK


def _parse_day_time(text: str) -> int:
    """'HH:MM:SS' -> seconds from midnight; '24:00:00' allowed."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"bad time of day: {text!r}")
    h, m, s = (int(p) for p in parts)
    if not (0 <= h <= 24 and 0 <= m <= 59 and 0 <= s <= 59):
        raise ValueError(f"bad time of day: {text!r}")
    total = h * 3600 + m * 60 + s
    if total > SECONDS_PER_DAY:
        raise ValueError(f"bad time of day: {text!r}")
    return total


def _format_day_time(seconds: int) -> str:
    h, rem = divmod(seconds, 3600)
    m, s = divmod(rem, 60)
    return f"{h:02d}:{m:02d}:{s:02d}"


@dataclass(frozen=True, order=True)
class CalendarEntry:
    """One weekday interval: weekday 0=Monday, begin/end in seconds of day.

    ``end`` may be 86400 (an exclusive 24:00:00 end-of-day bound).
    """

    weekday: int
    begin: int
    end: int

    def __post_init__(self) -> None:
        if not 0 <= self.weekday <= 6:
            raise ValueError(f"weekday out of range: {self.weekday}")
        if not (0 <= self.begin < self.end <= SECONDS_PER_DAY):
            raise ValueError(
                f"bad interval {_format_day_time(self.begin)}..{_format_day_time(self.end)}"
            )

    @property
    def week_start(self) -> int:
        return self.weekday * SECONDS_PER_DAY + self.begin

    @property
    def week_end(self) -> int:
        return self.weekday * SECONDS_PER_DAY + self.end

    @classmethod
    def parse(cls, weekday: str, begin_time: str, end_time: str) -> "CalendarEntry":
        if weekday not in _WEEKDAY_INDEX:
            raise ValueError(f"unknown weekday: {weekday!r}")
        return cls(_WEEKDAY_INDEX[weekday], _parse_day_time(begin_time), _parse_day_time(end_time))

    def to_json(self) -> dict:
        return {
            "weekday": WEEKDAY_NAMES[self.weekday],
            "beginTime": _format_day_time(self.begin),
            "endTime": _format_day_time(self.end),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CalendarEntry":
        return cls.parse(obj["weekday"], obj["beginTime"], obj["endTime"])

    def __str__(self) -> str:
        return (
            f"<{WEEKDAY_NAMES[self.weekday]}, "
            f"{_format_day_time(self.begin)}, {_format_day_time(self.end)}>"
        )


class WeeklyCalendar:
    """Immutable set of weekly availability intervals in canonical form.

    Overlapping and adjacent entries are merged on construction; the merge
    never changes what any query returns.
    """

    __slots__ = ("_intervals", "_starts", "_ends", "_prefix", "weekly_seconds")

    def __init__(self, entries: Iterable[CalendarEntry] = ()):
        raw = sorted((e.week_start, e.week_end) for e in entries)
        merged: list[tuple[int, int]] = []
        for s, e in raw:
            if merged and s <= merged[-1][1]:
                if e > merged[-1][1]:
                    merged[-1] = (merged[-1][0], e)
            else:
                merged.append((s, e))
        self._intervals: tuple[tuple[int, int], ...] = tuple(merged)
        self._starts = [s for s, _ in merged]
        self._ends = [e for _, e in merged]
        prefix = [0]
        for s, e in merged:
            prefix.append(prefix[-1] + (e - s))
        self._prefix = prefix
        self.weekly_seconds: int = prefix[-1]

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_json(cls, items: Iterable[dict]) -> "WeeklyCalendar":
        return cls(CalendarEntry.from_json(it) for it in items)

    @classmethod
    def full_time(cls) -> "WeeklyCalendar":
        return cls(CalendarEntry(d, 0, SECONDS_PER_DAY) for d in range(7))

    @classmethod
    def workweek(cls, begin: str = "09:00:00", end: str = "17:00:00",
                 days: Iterable[int] = range(5)) -> "WeeklyCalendar":
        b, e = _parse_day_time(begin), _parse_day_time(end)
        return cls(CalendarEntry(d, b, e) for d in days)

    def to_json(self) -> list[dict]:
        return [e.to_json() for e in self.entries()]

    # -- basic queries ---------------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return not self._intervals

    def entries(self) -> list[CalendarEntry]:
        """Canonical entries, split at day boundaries."""
        out: list[CalendarEntry] = []
        for s, e in self._intervals:
            while s < e:
                day = s // SECONDS_PER_DAY
                day_end = (day + 1) * SECONDS_PER_DAY
                chunk_end = min(e, day_end)
                out.append(CalendarEntry(day, s - day * SECONDS_PER_DAY, chunk_end - day * SECONDS_PER_DAY))
                s = chunk_end
        return out

    def covers_entry(self, entry: CalendarEntry) -> bool:
        """True iff the whole [begin, end) span of the entry is available."""
        ws, we = entry.week_start, entry.week_end
        i = bisect.bisect_right(self._starts, ws) - 1
        return i >= 0 and self._ends[i] >= we

    def contains(self, t: datetime) -> bool:
        wp = week_position(t)
        i = bisect.bisect_right(self._starts, wp) - 1
        return i >= 0 and wp < self._ends[i]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, WeeklyCalendar) and self._intervals == other._intervals

    def __hash__(self) -> int:
        return hash(self._intervals)

    def __repr__(self) -> str:
        return f"WeeklyCalendar({', '.join(str(e) for e in self.entries())})"

    # -- the three hot operations, on the reference-seconds axis ---------------

    def next_available_ref(self, rs: float) -> float:
        if not self._intervals:
            raise EmptyCalendarError("calendar has no availability intervals")
        wp = rs % SECONDS_PER_WEEK
        i = bisect.bisect_right(self._ends, wp)
        if i < len(self._intervals):
            s = self._starts[i]
            return rs if wp >= s else rs + (s - wp)
        # wrap into next week's first interval
        return rs + (SECONDS_PER_WEEK - wp) + self._starts[0]

    def _cumulative(self, rs: float) -> float:
        """In-calendar seconds from the reference origin up to rs."""
        weeks, wp = divmod(rs, SECONDS_PER_WEEK)
        i = bisect.bisect_right(self._starts, wp)
        partial = self._prefix[i]
        if i > 0 and wp < self._ends[i - 1]:
            partial -= self._ends[i - 1] - wp
        return weeks * self.weekly_seconds + partial

    def duration_ref(self, rs1: float, rs2: float) -> float:
        if rs1 > rs2:
            raise ValueError("interval end precedes its start")
        if not self._intervals:
            return 0.0
        return self._cumulative(rs2) - self._cumulative(rs1)

    def completion_ref(self, start: float, ideal: float) -> float:
        """Earliest instant by which `ideal` in-calendar seconds elapse from start."""
        if ideal < 0:
            raise ValueError("ideal duration must be nonnegative")
        if ideal == 0:
            return start
        if not self._intervals or self.weekly_seconds == 0:
            raise EmptyCalendarError("calendar has no availability intervals")
        start = self.next_available_ref(start)
        base = self._cumulative(start)
        target = base + ideal
        if target <= base:  # ideal vanished below float resolution
            return start
        weeks, rem = divmod(target, self.weekly_seconds)
        if rem == 0:
            # lands exactly on a week's worth: finish at the end of the last
            # interval of the previous week
            weeks -= 1
            rem = self.weekly_seconds
        i = bisect.bisect_left(self._prefix, rem) - 1
        offset = self._starts[i] + (rem - self._prefix[i])
        return weeks * SECONDS_PER_WEEK + offset

    # -- datetime-facing wrappers ----------------------------------------------

    def next_available(self, t: datetime) -> datetime:
        return from_refsec(self.next_available_ref(refsec(t)))

    def in_calendar_duration(self, t1: datetime, t2: datetime) -> float:
        return self.duration_ref(refsec(t1), refsec(t2))

    def idle_processing_completion(self, start: datetime, ideal_seconds: float) -> datetime:
        return from_refsec(self.completion_ref(refsec(start), ideal_seconds))


# Module-level forms used throughout; mirror the calendar methods.

def next_available(cal: WeeklyCalendar, t: datetime) -> datetime:
    """Smallest t' >= t that lies inside an availability interval."""
    return cal.next_available(t)


def in_calendar_duration(cal: WeeklyCalendar, t1: datetime, t2: datetime) -> float:
    """Seconds of [t1, t2] that intersect the calendar."""
    return cal.in_calendar_duration(t1, t2)


def idle_processing_completion(cal: WeeklyCalendar, start: datetime, ideal_seconds: float) -> datetime:
    """Walk the calendar from `start` until `ideal_seconds` of availability passed."""
    return cal.idle_processing_completion(start, ideal_seconds)


# -- granules and candidate multisets -----------------------------------------


def _check_granule(n_minutes: int) -> None:
    if n_minutes <= 0 or 1440 % n_minutes != 0:
        raise ValueError(f"granule size must divide 1440 minutes, got {n_minutes}")


def granule_of(t: datetime, n_minutes: int) -> CalendarEntry:
    """The length-n granule of t's weekday containing t's wall-clock time."""
    _check_granule(n_minutes)
    span = n_minutes * 60
    day_seconds = t.hour * 3600 + t.minute * 60 + t.second
    k = day_seconds // span
    return CalendarEntry(t.weekday(), k * span, (k + 1) * span)


@dataclass
class CandidateMultiset:
    """Multiset of granule-aligned calendar-entry candidates.

    Each event contributes its start and its completion stamp (two
    increments even when both land in the same granule). The per-activity
    date sets back the confidence metric: for every activity and granule we
    remember on which calendar dates the activity was observed there.
    """

    granule_minutes: int
    counts: dict[CalendarEntry, int] = field(default_factory=dict)
    activity_entry_dates: dict[str, dict[CalendarEntry, set[date]]] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def is_empty(self) -> bool:
        return not self.counts

    def add_stamp(self, t: datetime, activity: str | None = None) -> None:
        entry = granule_of(t, self.granule_minutes)
        self.counts[entry] = self.counts.get(entry, 0) + 1
        if activity is not None:
            per_entry = self.activity_entry_dates.setdefault(activity, {})
            per_entry.setdefault(entry, set()).add(t.date())

    def weekday_dates(self, activity: str, weekday: int) -> set[date]:
        """Distinct dates of the given weekday on which the activity was observed."""
        out: set[date] = set()
        for entry, dates in self.activity_entry_dates.get(activity, {}).items():
            if entry.weekday == weekday:
                out.update(dates)
        return out


def extract_candidates(events: Iterable, n_minutes: int) -> CandidateMultiset:
    """Build the candidate multiset from the start/end stamps of events.

    `events` is anything with `.start`, `.end` and `.activity` attributes.
    """
    _check_granule(n_minutes)
    omega = CandidateMultiset(n_minutes)
    for ev in events:
        omega.add_stamp(ev.start, ev.activity)
        omega.add_stamp(ev.end, ev.activity)
    return omega


def stamps_to_candidates(stamps: Iterable[datetime], n_minutes: int,
                         activity: str = "__arrival__") -> CandidateMultiset:
    """Candidate multiset from bare timestamps (one increment per stamp)."""
    _check_granule(n_minutes)
    omega = CandidateMultiset(n_minutes)
    for t in stamps:
        omega.add_stamp(t, activity)
    return omega


def ceil_to_second(t: datetime) -> datetime:
    """Round up to whole seconds (identity on already-whole timestamps)."""
    if t.microsecond == 0:
        return t
    return t.replace(microsecond=0) + timedelta(seconds=1)
