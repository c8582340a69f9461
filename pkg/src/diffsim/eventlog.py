"""Event logs: CSV ingest/emit, index sets, per-log KPIs, and estimation of
arrival and branching parameters by replaying the log over the graph."""

from __future__ import annotations

import csv
import io
import statistics
from collections import Counter, deque
from dataclasses import dataclass, field
from datetime import datetime

from .calendars import WeeklyCalendar
from .distributions import DistributionSpec
from .model import BranchingProbabilities, GatewayKind, ProcessGraph

REQUIRED_COLUMNS = ("case_id", "activity", "resource", "start_time", "end_time")
OPTIONAL_ENABLE_COLUMN = "enable_time"

# Cap on markings explored while searching a gateway path during replay.
_REPLAY_STATE_LIMIT = 20_000


class LogSchemaError(ValueError):
    pass


@dataclass(frozen=True)
class Event:
    case_id: str
    activity: str
    resource: str
    start: datetime
    end: datetime
    enabled: datetime | None = None

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError(f"event of case {self.case_id!r} ends before it starts")
        if self.enabled is not None and self.enabled > self.start:
            raise ValueError(f"event of case {self.case_id!r} enabled after its start")

    @property
    def processing_seconds(self) -> float:
        return (self.end - self.start).total_seconds()

    @property
    def waiting_seconds(self) -> float:
        if self.enabled is None:
            return 0.0
        return (self.start - self.enabled).total_seconds()


@dataclass(frozen=True)
class Trace:
    case_id: str
    events: tuple[Event, ...]

    def __post_init__(self) -> None:
        if not self.events:
            raise ValueError("trace must contain at least one event")

    @property
    def cycle_seconds(self) -> float:
        start = min(e.start for e in self.events)
        end = max(e.end for e in self.events)
        return (end - start).total_seconds()

    @property
    def start(self) -> datetime:
        return min(e.start for e in self.events)


class EventLog:
    """Ordered traces; events within a trace sorted by start (ties by end)."""

    def __init__(self, traces: list[Trace], warnings: dict[str, int] | None = None):
        self.traces = list(traces)
        self.warnings = dict(warnings or {})

    def __len__(self) -> int:
        return len(self.traces)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, EventLog) and self.traces == other.traces

    def events(self):
        for trace in self.traces:
            yield from trace.events

    @property
    def event_count(self) -> int:
        return sum(len(t.events) for t in self.traces)

    @classmethod
    def from_events(cls, events: list[Event], warnings: dict[str, int] | None = None) -> "EventLog":
        by_case: dict[str, list[Event]] = {}
        for ev in events:
            by_case.setdefault(ev.case_id, []).append(ev)
        traces = [
            Trace(case_id, tuple(sorted(evs, key=lambda e: (e.start, e.end))))
            for case_id, evs in by_case.items()
        ]
        return cls(traces, warnings)


def read_log(csv_text: str) -> EventLog:
    """Parse the CSV schema (case_id, activity, resource, start_time,
    end_time, optional enable_time). Rows ending before they start are
    dropped and counted in the log's warning summary; an enablement after
    the start is dropped (the row is kept) and counted likewise."""
    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = next(reader)
    except StopIteration:
        raise LogSchemaError("empty log file") from None
    header = [h.strip() for h in header]
    missing = [c for c in REQUIRED_COLUMNS if c not in header]
    if missing:
        raise LogSchemaError(f"missing required column(s): {', '.join(missing)}")
    col = {name: header.index(name) for name in header}
    has_enable = OPTIONAL_ENABLE_COLUMN in col

    events: list[Event] = []
    warnings = {"rows_end_before_start": 0, "enablement_after_start": 0}
    for row_no, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue

        def _stamp(column: str) -> datetime:
            raw = row[col[column]].strip()
            try:
                return datetime.fromisoformat(raw)
            except ValueError:
                raise LogSchemaError(
                    f"row {row_no}, column {column}: unparseable timestamp {raw!r}"
                ) from None

        start = _stamp("start_time")
        end = _stamp("end_time")
        if start > end:
            warnings["rows_end_before_start"] += 1
            continue
        enabled = None
        if has_enable and row[col[OPTIONAL_ENABLE_COLUMN]].strip():
            enabled = _stamp(OPTIONAL_ENABLE_COLUMN)
            if enabled > start:
                warnings["enablement_after_start"] += 1
                enabled = None
        events.append(
            Event(
                case_id=row[col["case_id"]].strip(),
                activity=row[col["activity"]].strip(),
                resource=row[col["resource"]].strip(),
                start=start,
                end=end,
                enabled=enabled,
            )
        )
    if not events:
        raise LogSchemaError("log contains no usable events")
    return EventLog.from_events(events, warnings)


def write_log(log: EventLog) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["case_id", "activity", "resource", "enable_time", "start_time", "end_time"])
    for trace in log.traces:
        for e in trace.events:
            writer.writerow(
                [
                    e.case_id,
                    e.activity,
                    e.resource,
                    e.enabled.isoformat() if e.enabled is not None else "",
                    e.start.isoformat(),
                    e.end.isoformat(),
                ]
            )
    return out.getvalue()


# -- index sets ----------------------------------------------------------------


class LogIndex:
    """Per-resource and per-activity event subsets of a log."""

    def __init__(self, log: EventLog):
        self.resources: set[str] = set()
        self.activities: set[str] = set()
        self.activities_of: dict[str, set[str]] = {}
        self.events_of_resource: dict[str, list[Event]] = {}
        self.events_of_activity: dict[str, list[Event]] = {}
        self.events_of: dict[tuple[str, str], list[Event]] = {}
        for ev in log.events():
            self.resources.add(ev.resource)
            self.activities.add(ev.activity)
            self.activities_of.setdefault(ev.resource, set()).add(ev.activity)
            self.events_of_resource.setdefault(ev.resource, []).append(ev)
            self.events_of_activity.setdefault(ev.activity, []).append(ev)
            self.events_of.setdefault((ev.resource, ev.activity), []).append(ev)

    def count(self, resource: str, activity: str) -> int:
        return len(self.events_of.get((resource, activity), []))

    def max_count(self, activity: str) -> int:
        return max(
            (len(evs) for (r, a), evs in self.events_of.items() if a == activity),
            default=0,
        )


# -- KPIs ------------------------------------------------------------------------


def _aggregate(values: list[float]) -> dict[str, float]:
    if not values:
        return {}
    ordered = sorted(values)
    n = len(ordered)

    def pct(q: float) -> float:
        if n == 1:
            return ordered[0]
        pos = q * (n - 1)
        lo = int(pos)
        hi = min(lo + 1, n - 1)
        return ordered[lo] + (ordered[hi] - ordered[lo]) * (pos - lo)

    return {
        "count": float(n),
        "mean": statistics.fmean(ordered),
        "min": ordered[0],
        "max": ordered[-1],
        "p50": pct(0.50),
        "p90": pct(0.90),
    }


@dataclass
class KpiReport:
    cycle_times: dict[str, float]  # case id -> seconds
    waiting_times: list[float]
    processing_times: list[float]
    utilization: dict[str, float]  # resource -> ratio, present only with calendars
    enablement_missing: int
    aggregates: dict[str, dict[str, float]] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "cycle_times": self.cycle_times,
            "waiting_times": self.waiting_times,
            "processing_times": self.processing_times,
            "utilization": self.utilization,
            "enablement_missing": self.enablement_missing,
            "aggregates": self.aggregates,
        }


def compute_kpis(log: EventLog, calendars: dict[str, WeeklyCalendar] | None = None) -> KpiReport:
    """Waiting, processing, cycle times, and (when calendars are supplied)
    per-resource utilization over the log's time span."""
    if not log.traces:
        raise ValueError("empty log")
    cycle_times = {t.case_id: t.cycle_seconds for t in log.traces}
    waiting: list[float] = []
    processing: list[float] = []
    missing = 0
    busy: dict[str, float] = {}
    span_start = min(e.start for e in log.events())
    span_end = max(e.end for e in log.events())
    for ev in log.events():
        if ev.enabled is None:
            missing += 1
        waiting.append(ev.waiting_seconds)
        processing.append(ev.processing_seconds)
        busy[ev.resource] = busy.get(ev.resource, 0.0) + ev.processing_seconds
    utilization: dict[str, float] = {}
    if calendars:
        for resource, busy_seconds in busy.items():
            cal = calendars.get(resource)
            if cal is None or cal.is_empty:
                continue
            available = cal.in_calendar_duration(span_start, span_end)
            if available <= 0:
                continue
            utilization[resource] = min(1.0, max(0.0, busy_seconds / available))
    report = KpiReport(
        cycle_times=cycle_times,
        waiting_times=waiting,
        processing_times=processing,
        utilization=utilization,
        enablement_missing=missing,
        aggregates={
            "cycle_time": _aggregate(list(cycle_times.values())),
            "waiting_time": _aggregate(waiting),
            "processing_time": _aggregate(processing),
        },
    )
    return report


# -- token-game replay and branching estimation -----------------------------------


def _fire_gateway_moves(graph: ProcessGraph, marking: dict[str, int]):
    """All single gateway firings applicable to a marking.

    Yields (next_marking, xor_arc_taken_or_None). Deterministic order:
    marked arcs sorted by id, gateway out-arcs in document order.
    """
    for arc_id in sorted(marking):
        flow = graph.flow_by_id[arc_id]
        node = flow.target
        kind = graph.gateways.get(node)
        if kind is None:
            if node in graph.end_events:
                nxt = dict(marking)
                _dec(nxt, arc_id)
                yield nxt, None
            continue
        if kind == GatewayKind.EXCLUSIVE_SPLIT:
            for out in graph.outgoing[node]:
                nxt = dict(marking)
                _dec(nxt, arc_id)
                nxt[out.id] = nxt.get(out.id, 0) + 1
                yield nxt, out.id
        elif kind == GatewayKind.EXCLUSIVE_JOIN:
            out = graph.outgoing[node][0]
            nxt = dict(marking)
            _dec(nxt, arc_id)
            nxt[out.id] = nxt.get(out.id, 0) + 1
            yield nxt, None
        elif kind == GatewayKind.PARALLEL_SPLIT:
            nxt = dict(marking)
            _dec(nxt, arc_id)
            for out in graph.outgoing[node]:
                nxt[out.id] = nxt.get(out.id, 0) + 1
            yield nxt, None
        else:  # parallel join: fires only with a token on every incoming arc
            incoming = graph.incoming[node]
            if all(marking.get(f.id, 0) >= 1 for f in incoming):
                nxt = dict(marking)
                for f in incoming:
                    _dec(nxt, f.id)
                out = graph.outgoing[node][0]
                nxt[out.id] = nxt.get(out.id, 0) + 1
                yield nxt, None


def _dec(marking: dict[str, int], arc_id: str) -> None:
    marking[arc_id] -= 1
    if marking[arc_id] == 0:
        del marking[arc_id]


def _search(graph: ProcessGraph, marking: dict[str, int], goal) -> tuple[dict[str, int], tuple[str, ...]] | None:
    """BFS over gateway firings until `goal(marking)` holds.

    Returns (reached marking, xor arcs traversed) of the first hit, or None.
    """
    start = tuple(sorted(marking.items()))
    if goal(marking):
        return dict(marking), ()
    seen = {start}
    queue = deque([(marking, ())])
    while queue:
        current, path = queue.popleft()
        for nxt, xor_arc in _fire_gateway_moves(graph, current):
            key = tuple(sorted(nxt.items()))
            if key in seen:
                continue
            seen.add(key)
            if len(seen) > _REPLAY_STATE_LIMIT:
                return None
            nxt_path = path + (xor_arc,) if xor_arc else path
            if goal(nxt):
                return nxt, nxt_path
            queue.append((nxt, nxt_path))
    return None


def replay_trace(graph: ProcessGraph, labels: list[str]) -> Counter | None:
    """Replay one activity sequence over the graph's token game.

    Returns the multiset of exclusive-split arcs traversed, or None when the
    trace cannot be replayed to completion (all tokens absorbed at ends).
    """
    start_arc = graph.outgoing[graph.start_event][0].id
    marking: dict[str, int] = {start_arc: 1}
    taken: Counter = Counter()
    for label in labels:
        node = graph.label_to_id.get(label)
        if node is None:
            return None
        in_arc = graph.incoming[node][0].id
        hit = _search(graph, marking, lambda m: m.get(in_arc, 0) >= 1)
        if hit is None:
            return None
        marking, path = hit
        taken.update(path)
        _dec(marking, in_arc)
        out_arc = graph.outgoing[node][0].id
        marking[out_arc] = marking.get(out_arc, 0) + 1
    hit = _search(graph, marking, lambda m: not m)
    if hit is None:
        return None
    taken.update(hit[1])
    return taken


def estimate_branching(
    log: EventLog, graph: ProcessGraph
) -> tuple[BranchingProbabilities, dict]:
    """Branching probabilities by counting conditional flow traversals.

    Traces that do not replay on the graph are skipped; the report carries
    the skip rate. Exclusive splits never reached get uniform probabilities.
    """
    unknown = {e.activity for e in log.events()} - graph.activity_labels
    if unknown:
        raise ValueError(f"log activities missing from the graph: {sorted(unknown)}")
    traversals: Counter = Counter()
    skipped: list[str] = []
    for trace in log.traces:
        labels = [e.activity for e in trace.events]
        counts = replay_trace(graph, labels)
        if counts is None:
            skipped.append(trace.case_id)
        else:
            traversals.update(counts)
    probs: dict[str, float] = {}
    unreached: list[str] = []
    for gw in graph.exclusive_splits():
        arcs = graph.outgoing[gw]
        total = sum(traversals.get(f.id, 0) for f in arcs)
        if total == 0:
            unreached.append(gw)
            for f in arcs:
                probs[f.id] = 1.0 / len(arcs)
        else:
            for f in arcs:
                probs[f.id] = traversals.get(f.id, 0) / total
    report = {
        "replayed_traces": len(log.traces) - len(skipped),
        "skipped_traces": skipped,
        "skip_rate": len(skipped) / len(log.traces) if log.traces else 0.0,
        "unreached_gateways": unreached,
    }
    return BranchingProbabilities(graph, probs), report


def estimate_interarrival(
    log: EventLog,
    granule_minutes: int = 60,
    d_conf: float = 0.1,
    d_supp: float = 0.7,
) -> tuple[DistributionSpec, WeeklyCalendar]:
    """Inter-arrival distribution and arrival calendar from case start times.

    The case start series is the first event start of each trace; deltas of
    the sorted series are curve-fitted, and the arrival calendar is mined
    from the start timestamps with the usual confidence/support procedure.
    """
    from .discovery import best_fitted_distribution, discover_calendar
    from .calendars import stamps_to_candidates

    if len(log.traces) < 2:
        raise ValueError("need at least 2 traces to estimate inter-arrival times")
    starts = sorted(t.start for t in log.traces)
    deltas = [
        (b - a).total_seconds() for a, b in zip(starts, starts[1:])
    ]
    if len(deltas) == 1:
        dist = DistributionSpec("fixed", (deltas[0],))
    else:
        dist = best_fitted_distribution(deltas)
    omega = stamps_to_candidates(starts, granule_minutes)
    calendar = discover_calendar(omega, d_supp=d_supp, d_conf=d_conf)
    return dist, calendar
