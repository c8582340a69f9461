"""Discovery of differentiated resource profiles from an event log.

Pipeline: index the log, score every resource's relative participation,
mine a weekly calendar per sufficiently participating resource from its
granule candidates (confidence filter, then support top-up), fold the
events of discarded resources into aggregated resources built from maximal
disjoint interval groups, and fit per resource-activity processing-time
distributions on calendar-adjusted durations. The undifferentiated baseline
mode instead shares one aggregate calendar and pooled per-activity
distributions across all resources.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .calendars import (
    CalendarEntry,
    CandidateMultiset,
    WeeklyCalendar,
    extract_candidates,
)
from .distributions import DistributionSpec
from .eventlog import Event, EventLog, LogIndex, estimate_branching, estimate_interarrival
from .model import DifferentiatedSimModel, ProcessGraph, ResourceProfile

MODE_DIFFERENTIATED = "differentiated"  # SP-DP-DA
MODE_BASELINE = "undifferentiated-baseline"  # SP-NP-NA

# Families tried by the curve fitter, cheapest parameterization first; a
# family this much worse (relative RSS) than the best loses the tie-break.
_FIT_FAMILIES = ("exponential", "uniform", "normal", "lognormal", "gamma")
_FIT_TIE_BAND = 0.05


@dataclass
class DiscoveryParams:
    granule_minutes: int = 60
    d_conf: float = 0.1
    d_supp: float = 0.7
    d_part: float = 0.4
    bin_size: int = 50
    mode: str = MODE_DIFFERENTIATED

    def __post_init__(self) -> None:
        if 1440 % self.granule_minutes != 0:
            raise ValueError("granule size must divide 1440 minutes")
        for name in ("d_conf", "d_supp", "d_part"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.bin_size < 1:
            raise ValueError("bin_size must be positive")
        if self.mode not in (MODE_DIFFERENTIATED, MODE_BASELINE):
            raise ValueError(f"unknown discovery mode {self.mode!r}")

    def to_json(self) -> dict:
        return {
            "granule_minutes": self.granule_minutes,
            "d_conf": self.d_conf,
            "d_supp": self.d_supp,
            "d_part": self.d_part,
            "bin_size": self.bin_size,
            "mode": self.mode,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DiscoveryParams":
        return cls(**obj)


@dataclass
class DiscoveryReport:
    mode: str
    params: dict
    participation: dict[str, float] = field(default_factory=dict)
    kept_resources: list[str] = field(default_factory=list)
    discarded_resources: list[str] = field(default_factory=list)
    calendar_metrics: dict[str, dict] = field(default_factory=dict)
    aggregated_resources: dict[str, dict] = field(default_factory=dict)
    unrestricted_fallbacks: list[str] = field(default_factory=list)
    fit_residuals: dict[str, float] = field(default_factory=dict)
    activities_absent_from_log: list[str] = field(default_factory=list)
    branching: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "params": self.params,
            "participation": self.participation,
            "kept_resources": self.kept_resources,
            "discarded_resources": self.discarded_resources,
            "calendar_metrics": self.calendar_metrics,
            "aggregated_resources": self.aggregated_resources,
            "unrestricted_fallbacks": self.unrestricted_fallbacks,
            "fit_residuals": self.fit_residuals,
            "activities_absent_from_log": self.activities_absent_from_log,
            "branching": self.branching,
        }


# -- the three filtering metrics -------------------------------------------------


def confidence(entry: CalendarEntry, omega: CandidateMultiset) -> float:
    """Activity-conditioned confidence of one granule candidate.

    Per activity observed in the granule: on what fraction of the granule
    weekday's distinct calendar dates (among dates the resource touched that
    activity at all) did the activity hit this granule. The maximum over
    activities is returned; an unobserved granule scores 0.
    """
    best = 0.0
    for activity, per_entry in omega.activity_entry_dates.items():
        dates_in_entry = per_entry.get(entry)
        if not dates_in_entry:
            continue
        dates_on_weekday = omega.weekday_dates(activity, entry.weekday)
        if dates_on_weekday:
            best = max(best, len(dates_in_entry) / len(dates_on_weekday))
    return best


def support(cal: WeeklyCalendar, omega: CandidateMultiset) -> float:
    """Fraction of candidate multiplicity covered by the calendar (0 for an
    empty multiset)."""
    total = omega.total
    if total == 0:
        return 0.0
    covered = sum(m for entry, m in omega.counts.items() if cal.covers_entry(entry))
    return covered / total


def participation(resource: str, index: LogIndex) -> float:
    """Event volume of the resource relative to the top performer of each of
    its activities."""
    activities = index.activities_of.get(resource, set())
    numerator = sum(index.count(resource, a) for a in activities)
    denominator = sum(index.max_count(a) for a in activities)
    return numerator / denominator if denominator else 0.0


# -- calendar discovery ------------------------------------------------------------


def discover_calendar(omega: CandidateMultiset, d_supp: float, d_conf: float) -> WeeklyCalendar:
    """Keep candidates whose confidence clears d_conf; while the kept set's
    support is below d_supp, add back discarded candidates in decreasing
    multiplicity (ties: weekday Monday-first, then begin time)."""
    included: set[CalendarEntry] = set()
    discarded: list[CalendarEntry] = []
    for entry in sorted(omega.counts):
        if confidence(entry, omega) >= d_conf:
            included.add(entry)
        else:
            discarded.append(entry)
    total = omega.total
    if total:
        covered = sum(omega.counts[e] for e in included)
        if covered / total < d_supp:
            for entry in sorted(discarded, key=lambda e: (-omega.counts[e], e)):
                included.add(entry)
                covered += omega.counts[entry]
                if covered / total >= d_supp:
                    break
    return WeeklyCalendar(included)


# -- aggregated resources ------------------------------------------------------------


def max_disjoint_intervals(items: list) -> list[list]:
    """Partition intervals into groups by repeatedly peeling off a
    maximum-cardinality set of pairwise disjoint intervals (greedy earliest
    finish). Items are (start, end) pairs or objects with .start/.end;
    touching endpoints count as disjoint."""

    def bounds(item) -> tuple:
        if isinstance(item, tuple):
            return item[0], item[1]
        return item.start, item.end

    for item in items:
        s, e = bounds(item)
        if s > e:
            raise ValueError("interval ends before it starts")
    remaining = sorted(range(len(items)), key=lambda i: (bounds(items[i])[1], bounds(items[i])[0], i))
    groups: list[list] = []
    while remaining:
        group: list[int] = []
        rest: list[int] = []
        frontier = None
        for i in remaining:
            s, e = bounds(items[i])
            if frontier is None or s >= frontier:
                group.append(i)
                frontier = e
            else:
                rest.append(i)
        groups.append([items[i] for i in group])
        remaining = rest
    return groups


# -- processing-time fitting ----------------------------------------------------------


def _fit(durations: list[float], bin_size: int) -> tuple[DistributionSpec, float]:
    arr = np.asarray(durations, dtype=float)
    n = len(arr)
    if n < 2:
        raise ValueError("need at least 2 durations to fit a distribution")
    mean = float(arr.mean())
    var = float(arr.var())
    if arr.max() == arr.min() or var <= (1e-9 * max(abs(mean), 1.0)) ** 2:
        return DistributionSpec("fixed", (max(mean, 0.0),)), 0.0
    bins = min(bin_size, math.ceil(math.sqrt(n)))
    hist, edges = np.histogram(arr, bins=bins, density=True)
    centers = (edges[:-1] + edges[1:]) / 2
    fits: list[tuple[str, DistributionSpec, float]] = []
    for family in _FIT_FAMILIES:
        spec = DistributionSpec.from_moments(family, mean, var)
        if spec is None:
            continue
        density = np.array([spec.pdf(float(x)) for x in centers])
        rss = float(((density - hist) ** 2).sum())
        fits.append((family, spec, rss))
    best_rss = min(rss for _, _, rss in fits)
    # nested families (gamma with shape 1 is exponential) make the argmin
    # noise-driven; within a narrow band the simpler parameterization wins
    for _, spec, rss in fits:
        if rss <= best_rss * (1 + _FIT_TIE_BAND):
            return spec, rss
    raise AssertionError("unreachable")


def best_fitted_distribution(durations: list[float], bin_size: int = 50) -> DistributionSpec:
    """Histogram curve fit over the distribution library: moment-matched
    parameters per family, lowest residual sum of squares wins. Zero
    variance short-circuits to a fixed duration."""
    return _fit(durations, bin_size)[0]


def _adjusted_duration(event: Event, cal: WeeklyCalendar | None) -> float:
    raw = event.processing_seconds
    if cal is None or cal.is_empty:
        return raw
    adjusted = cal.in_calendar_duration(event.start, event.end)
    # an event entirely outside the mined calendar keeps its raw duration so
    # fits cannot degenerate to zero
    return adjusted if adjusted > 0 else raw


def _fit_durations(durations: list[float], bin_size: int) -> tuple[DistributionSpec, float]:
    if len(durations) == 1:
        return DistributionSpec("fixed", (max(durations[0], 0.0),)), 0.0
    return _fit(durations, bin_size)


def discover_processing_times(
    executors_by_activity: dict[str, list[tuple[str, list[Event]]]],
    calendars: dict[str, WeeklyCalendar],
    params: DiscoveryParams,
) -> tuple[dict[tuple[str, str], DistributionSpec], dict[str, float]]:
    """Per (resource, activity) distribution: an individual fit on the
    resource's calendar-adjusted durations when it executed at least
    bin_size instances, otherwise the joint fit over all instances of the
    activity."""
    perf: dict[tuple[str, str], DistributionSpec] = {}
    residuals: dict[str, float] = {}
    for activity in sorted(executors_by_activity):
        executors = executors_by_activity[activity]
        all_durations: list[float] = []
        for resource, events in executors:
            cal = calendars.get(resource)
            all_durations.extend(_adjusted_duration(e, cal) for e in events)
        if not all_durations:
            raise ValueError(f"activity {activity!r} has no events to fit")
        joint, joint_rss = _fit_durations(all_durations, params.bin_size)
        residuals[f"::{activity}"] = joint_rss
        for resource, events in executors:
            if len(events) >= params.bin_size:
                cal = calendars.get(resource)
                durations = [_adjusted_duration(e, cal) for e in events]
                spec, rss = _fit_durations(durations, params.bin_size)
                perf[(resource, activity)] = spec
                residuals[f"{resource}::{activity}"] = rss
            else:
                perf[(resource, activity)] = joint
    return perf, residuals


# -- the full pipeline -------------------------------------------------------------------


def discover_resource_profiles(
    log: EventLog, graph: ProcessGraph, params: DiscoveryParams
) -> tuple[DifferentiatedSimModel, DiscoveryReport]:
    """Discover a differentiated simulation model (or the undifferentiated
    baseline) from an event log over a given control-flow graph."""
    if not log.traces:
        raise ValueError("empty log")
    index = LogIndex(log)
    unknown = index.activities - graph.activity_labels
    if unknown:
        raise ValueError(f"log activities missing from the graph: {sorted(unknown)}")
    report = DiscoveryReport(mode=params.mode, params=params.to_json())
    report.activities_absent_from_log = sorted(graph.activity_labels - index.activities)

    if params.mode == MODE_BASELINE:
        profiles = _baseline_profiles(log, index, params, report)
    else:
        profiles = _differentiated_profiles(index, params, report)

    bp, branch_report = estimate_branching(log, graph)
    report.branching = {
        "replayed_traces": branch_report["replayed_traces"],
        "skip_rate": branch_report["skip_rate"],
        "unreached_gateways": branch_report["unreached_gateways"],
    }
    at, ac = estimate_interarrival(
        log,
        granule_minutes=params.granule_minutes,
        d_conf=params.d_conf,
        d_supp=params.d_supp,
    )
    model = DifferentiatedSimModel(graph=graph, profiles=profiles, bp=bp, at=at, ac=ac)
    return model, report


def _calendar_metrics(cal: WeeklyCalendar, omega: CandidateMultiset) -> dict:
    confidences = [confidence(e, omega) for e in omega.counts if cal.covers_entry(e)]
    return {
        "support": support(cal, omega),
        "entries": len(cal.entries()),
        "min_entry_confidence": min(confidences) if confidences else 0.0,
    }


def _differentiated_profiles(
    index: LogIndex, params: DiscoveryParams, report: DiscoveryReport
) -> list[ResourceProfile]:
    calendars: dict[str, WeeklyCalendar] = {}
    kept: list[str] = []
    discarded: list[str] = []
    for resource in sorted(index.resources):
        score = participation(resource, index)
        report.participation[resource] = score
        omega = extract_candidates(index.events_of_resource[resource], params.granule_minutes)
        if score >= params.d_part:
            cal = discover_calendar(omega, d_supp=params.d_supp, d_conf=params.d_conf)
            if not cal.is_empty:
                calendars[resource] = cal
                kept.append(resource)
                report.calendar_metrics[resource] = _calendar_metrics(cal, omega)
                continue
        discarded.append(resource)
    report.kept_resources = kept
    report.discarded_resources = discarded

    # events of discarded resources, grouped per activity into aggregated
    # resources so no activity is left without an executor
    executors_by_activity: dict[str, list[tuple[str, list[Event]]]] = {}
    for resource in kept:
        for activity in sorted(index.activities_of[resource]):
            executors_by_activity.setdefault(activity, []).append(
                (resource, index.events_of[(resource, activity)])
            )
    aggregated_alloc: dict[str, str] = {}
    for activity in sorted(index.activities):
        dropped_events: list[Event] = []
        for resource in discarded:
            dropped_events.extend(index.events_of.get((resource, activity), []))
        if not dropped_events:
            continue
        dropped_events.sort(key=lambda e: (e.start, e.end, e.resource))
        groups = max_disjoint_intervals(dropped_events)
        made_any = False
        k = 0
        for group in groups:
            omega = extract_candidates(group, params.granule_minutes)
            cal = discover_calendar(omega, d_supp=params.d_supp, d_conf=params.d_conf)
            if cal.is_empty:
                continue
            k += 1
            agg_id = f"AGG_{activity}_{k}"
            calendars[agg_id] = cal
            aggregated_alloc[agg_id] = activity
            executors_by_activity.setdefault(activity, []).append((agg_id, group))
            report.aggregated_resources[agg_id] = {
                "activity": activity,
                "events": len(group),
                **_calendar_metrics(cal, omega),
            }
            made_any = True
        if not made_any and activity not in executors_by_activity:
            # no executor survived: one unrestricted aggregate covering every
            # granule the dropped events touched, confidence and support unchecked
            omega = extract_candidates(dropped_events, params.granule_minutes)
            cal = WeeklyCalendar(omega.counts)
            agg_id = f"AGG_{activity}_1"
            calendars[agg_id] = cal
            aggregated_alloc[agg_id] = activity
            executors_by_activity[activity] = [(agg_id, dropped_events)]
            report.aggregated_resources[agg_id] = {
                "activity": activity,
                "events": len(dropped_events),
                "unrestricted": True,
            }
            report.unrestricted_fallbacks.append(activity)

    perf, residuals = discover_processing_times(executors_by_activity, calendars, params)
    report.fit_residuals = residuals

    profiles: list[ResourceProfile] = []
    for resource in kept:
        alloc = frozenset(index.activities_of[resource])
        profiles.append(
            ResourceProfile(
                id=resource,
                alloc=alloc,
                perf={a: perf[(resource, a)] for a in alloc},
                avail=calendars[resource],
            )
        )
    for agg_id in sorted(aggregated_alloc):
        activity = aggregated_alloc[agg_id]
        profiles.append(
            ResourceProfile(
                id=agg_id,
                alloc=frozenset({activity}),
                perf={activity: perf[(agg_id, activity)]},
                avail=calendars[agg_id],
            )
        )
    return profiles


def _baseline_profiles(
    log: EventLog, index: LogIndex, params: DiscoveryParams, report: DiscoveryReport
) -> list[ResourceProfile]:
    omega_all = extract_candidates(list(log.events()), params.granule_minutes)
    shared = discover_calendar(omega_all, d_supp=params.d_supp, d_conf=params.d_conf)
    if shared.is_empty:
        shared = WeeklyCalendar(omega_all.counts)
    report.calendar_metrics["__shared__"] = _calendar_metrics(shared, omega_all)
    joint: dict[str, DistributionSpec] = {}
    for activity in sorted(index.activities):
        durations = [
            _adjusted_duration(e, shared) for e in index.events_of_activity[activity]
        ]
        spec, rss = _fit_durations(durations, params.bin_size)
        joint[activity] = spec
        report.fit_residuals[f"::{activity}"] = rss
    profiles = []
    for resource in sorted(index.resources):
        report.participation[resource] = participation(resource, index)
        alloc = frozenset(index.activities_of[resource])
        profiles.append(
            ResourceProfile(
                id=resource,
                alloc=alloc,
                perf={a: joint[a] for a in alloc},
                avail=shared,
            )
        )
    report.kept_resources = sorted(index.resources)
    return profiles
