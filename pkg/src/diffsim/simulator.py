"""Discrete-event execution of differentiated-resource simulation models.

One run is a single priority-queue loop over enabled activity instances:
pop the event with the lowest enablement time, seize the allocated resource
that is ready earliest, stretch its sampled processing time over the
resource's calendar, then advance the case's token marking to find what
gets enabled next. One seeded RNG stream drives the whole run (inter-arrival
draws first, then branch and duration draws in strict event order), so a
(model, config) pair fully determines the output log.
"""

from __future__ import annotations

import heapq
import math
import time
from collections import deque
from dataclasses import dataclass, field
from datetime import datetime
from random import Random

from .calendars import from_refsec, refsec
from .eventlog import Event, EventLog, KpiReport, Trace, compute_kpis
from .model import (
    BranchingProbabilities,
    DifferentiatedSimModel,
    GatewayKind,
    ModelError,
    ProcessGraph,
    ResourceProfile,
    validate_model,
)


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimConfig:
    p_cases: int
    start_at: datetime
    seed: int
    max_events_per_case: int = 1000

    def __post_init__(self) -> None:
        if self.p_cases < 1:
            raise ValueError("p_cases must be >= 1")
        if self.max_events_per_case < 1:
            raise ValueError("max_events_per_case must be >= 1")


@dataclass
class CaseState:
    """Marking maps each flow arc to the creation times of the tokens on it
    (reference seconds). Times matter: a parallel join fires at the latest
    of the completions it synchronizes."""

    case_id: str
    index: int
    arrival: int  # reference seconds
    marking: dict[str, list[int]] = field(default_factory=dict)
    emitted: int = 0
    aborted: bool = False
    completed: bool = False


@dataclass
class RunReport:
    p_cases: int
    seed: int
    completed_cases: int
    aborted_cases: list[str]
    deadlocked_cases: list[str]
    events_executed: int
    wall_seconds: float

    def to_json(self) -> dict:
        return {
            "p_cases": self.p_cases,
            "seed": self.seed,
            "completed_cases": self.completed_cases,
            "aborted_cases": self.aborted_cases,
            "deadlocked_cases": self.deadlocked_cases,
            "events_executed": self.events_executed,
            "wall_seconds": self.wall_seconds,
        }


class DiffResourceQueue:
    """Per-activity views over the allocated resources.

    The default sorting criterion picks the resource that is ready the
    earliest (ties by resource id); other priority functions can be
    injected for alternative allocation policies."""

    def __init__(
        self,
        profiles: list[ResourceProfile],
        ready_at: dict[str, int],
        sorting_criteria=None,
    ):
        self.ready_at = ready_at
        self.sorting_criteria = sorting_criteria or (
            lambda prof: (self.ready_at[prof.id], prof.id)
        )
        self.by_activity: dict[str, list[ResourceProfile]] = {}
        for prof in profiles:
            for activity in prof.alloc:
                self.by_activity.setdefault(activity, []).append(prof)

    def pop(self, activity: str) -> ResourceProfile:
        candidates = self.by_activity.get(activity)
        if not candidates:
            raise SimulationError(f"no resource allocated to activity {activity!r}")
        return min(candidates, key=self.sorting_criteria)


def pop_resource(queue: DiffResourceQueue, activity: str) -> ResourceProfile:
    """Earliest-ready allocated resource; ties broken by lexicographic id."""
    return queue.pop(activity)


@dataclass(frozen=True)
class ArrivalEvent:
    case_id: str
    case_index: int
    at: datetime


def generate_arrival_events(
    model: DifferentiatedSimModel, config: SimConfig, rng: Random | None = None
) -> list[ArrivalEvent]:
    """Case creation instants: the first case arrives at startAt, each next
    one a sampled inter-arrival later; every instant is advanced into the
    arrival calendar."""
    rng = rng if rng is not None else Random(config.seed)
    instants = _arrival_instants(model, config, rng)
    return [
        ArrivalEvent(case_id=_case_id(i), case_index=i, at=from_refsec(t))
        for i, t in enumerate(instants)
    ]


def _arrival_instants(model: DifferentiatedSimModel, config: SimConfig, rng: Random) -> list[int]:
    if model.ac.is_empty:
        raise SimulationError("empty arrival calendar")
    instants: list[int] = []
    cursor = refsec(config.start_at)
    for i in range(config.p_cases):
        if i > 0:
            cursor += model.at.sample(rng)
        instants.append(math.ceil(model.ac.next_available_ref(cursor)))
    return instants


def _case_id(index: int) -> str:
    return f"case_{index + 1}"


def update_process_state(
    graph: ProcessGraph,
    bp: BranchingProbabilities,
    case: CaseState,
    completed_activity: str | None,
    rng: Random,
    at_time: int = 0,
) -> list[tuple[str, int]]:
    """Advance the token game after an activity (or, for None, the start
    event) finishes at `at_time`. Mutates the case marking; returns the
    newly enabled activities as (label, enablement time) pairs, one per
    enabling token. Tokens keep the completion time that created them, and
    a parallel join emits at the latest time among the tokens it consumes.
    End-event tokens are absorbed; the case is flagged complete when no
    tokens remain."""
    if completed_activity is None:
        source = graph.start_event
    else:
        source = graph.label_to_id[completed_activity]
    work: deque[tuple[str, int]] = deque()
    for flow in graph.outgoing[source]:
        _place(case.marking, flow.id, at_time)
        work.append((flow.id, at_time))
    enabled: list[tuple[str, int]] = []
    while work:
        arc, token_time = work.popleft()
        node = graph.flow_by_id[arc].target
        kind = graph.gateways.get(node)
        if kind is None:
            if node in graph.end_events:
                _consume(case.marking, arc, token_time)
            else:
                # activity enabled; its token stays on the arc until execution
                enabled.append((graph.activities[node], token_time))
            continue
        if kind == GatewayKind.EXCLUSIVE_SPLIT:
            _consume(case.marking, arc, token_time)
            chosen = _sample_branch(graph, bp, node, rng)
            _place(case.marking, chosen, token_time)
            work.append((chosen, token_time))
        elif kind == GatewayKind.EXCLUSIVE_JOIN:
            _consume(case.marking, arc, token_time)
            out = graph.outgoing[node][0].id
            _place(case.marking, out, token_time)
            work.append((out, token_time))
        elif kind == GatewayKind.PARALLEL_SPLIT:
            _consume(case.marking, arc, token_time)
            for flow in graph.outgoing[node]:
                _place(case.marking, flow.id, token_time)
                work.append((flow.id, token_time))
        else:  # parallel join: fires only once every incoming arc holds a token
            incoming = graph.incoming[node]
            if all(case.marking.get(f.id) for f in incoming):
                fire_time = 0
                for f in incoming:
                    fire_time = max(fire_time, _consume_earliest(case.marking, f.id))
                out = graph.outgoing[node][0].id
                _place(case.marking, out, fire_time)
                work.append((out, fire_time))
    if not case.marking:
        case.completed = True
    return enabled


def _place(marking: dict[str, list[int]], arc: str, token_time: int) -> None:
    marking.setdefault(arc, []).append(token_time)


def _consume(marking: dict[str, list[int]], arc: str, token_time: int) -> None:
    """Remove the token matching the given time (earliest one as fallback)."""
    tokens = marking[arc]
    try:
        tokens.remove(token_time)
    except ValueError:
        tokens.remove(min(tokens))
    if not tokens:
        del marking[arc]


def _consume_earliest(marking: dict[str, list[int]], arc: str) -> int:
    tokens = marking[arc]
    earliest = min(tokens)
    tokens.remove(earliest)
    if not tokens:
        del marking[arc]
    return earliest


def _sample_branch(graph: ProcessGraph, bp: BranchingProbabilities, gateway: str, rng: Random) -> str:
    u = rng.random()
    cumulative = 0.0
    arcs = graph.outgoing[gateway]
    for flow in arcs:
        cumulative += bp.probability(flow.id)
        if u < cumulative:
            return flow.id
    return arcs[-1].id


def simulate(
    model: DifferentiatedSimModel, config: SimConfig
) -> tuple[EventLog, KpiReport, RunReport]:
    """Run one simulation; returns the log (aborted cases excluded), the
    KPIs computed from that log, and the run report."""
    violations = validate_model(model)
    if violations:
        raise ModelError("invalid simulation model: " + "; ".join(violations))
    started = time.perf_counter()
    rng = Random(config.seed)
    graph = model.graph
    profiles = {p.id: p for p in model.profiles}
    start_ref = refsec(config.start_at)
    ready_at: dict[str, int] = {}
    for prof in model.profiles:
        ready_at[prof.id] = math.ceil(prof.avail.next_available_ref(start_ref))
    queue = DiffResourceQueue(model.profiles, ready_at)

    arrivals = _arrival_instants(model, config, rng)
    cases = [CaseState(case_id=_case_id(i), index=i, arrival=t) for i, t in enumerate(arrivals)]

    # heap items: (enablement, case index, activity label, sequence)
    # the empty label orders a case's start-event firing before activity
    # events enabled at the same instant
    heap: list[tuple[int, int, str, int]] = []
    seq = 0
    for case in cases:
        heap.append((case.arrival, case.index, "", seq))
        seq += 1
    heapq.heapify(heap)

    executed: list[tuple[int, str, str, int, int, int]] = []
    executed_count = 0

    def _enqueue_enabled(case: CaseState, enabled: list[tuple[str, int]]) -> None:
        nonlocal seq
        for label, tau0 in enabled:
            case.emitted += 1
            if case.emitted > config.max_events_per_case:
                case.aborted = True
                case.marking.clear()
                return
            heapq.heappush(heap, (tau0, case.index, label, seq))
            seq += 1

    while heap:
        tau0, case_index, label, _ = heapq.heappop(heap)
        case = cases[case_index]
        if case.aborted:
            continue
        if label == "":
            enabled = update_process_state(graph, model.bp, case, None, rng, at_time=tau0)
            _enqueue_enabled(case, enabled)
            continue
        in_arc = graph.incoming[graph.label_to_id[label]][0].id
        _consume(case.marking, in_arc, tau0)
        prof = queue.pop(label)
        cal = prof.avail
        tau_s = cal.next_available_ref(max(tau0, ready_at[prof.id]))
        ideal = prof.perf[label].sample(rng)
        tau_c = math.ceil(cal.completion_ref(tau_s, ideal))
        ready_at[prof.id] = math.ceil(cal.next_available_ref(tau_c))
        executed.append((case_index, label, prof.id, tau0, int(tau_s), tau_c))
        executed_count += 1
        enabled = update_process_state(graph, model.bp, case, label, rng, at_time=tau_c)
        _enqueue_enabled(case, enabled)

    aborted = [c.case_id for c in cases if c.aborted]
    deadlocked = [c.case_id for c in cases if not c.aborted and not c.completed]
    good = {c.index for c in cases if c.completed}

    events_by_case: dict[int, list[Event]] = {i: [] for i in good}
    for case_index, label, resource, tau0, tau_s, tau_c in executed:
        if case_index not in good:
            continue
        events_by_case[case_index].append(
            Event(
                case_id=_case_id(case_index),
                activity=label,
                resource=resource,
                start=from_refsec(tau_s),
                end=from_refsec(tau_c),
                enabled=from_refsec(tau0),
            )
        )
    traces = [
        Trace(_case_id(i), tuple(sorted(evs, key=lambda e: (e.start, e.end))))
        for i, evs in sorted(events_by_case.items())
        if evs
    ]
    log = EventLog(traces)
    kpis = compute_kpis(log, calendars={p.id: p.avail for p in model.profiles}) if traces else None
    report = RunReport(
        p_cases=config.p_cases,
        seed=config.seed,
        completed_cases=len(good),
        aborted_cases=aborted,
        deadlocked_cases=deadlocked,
        events_executed=executed_count,
        wall_seconds=time.perf_counter() - started,
    )
    if kpis is None:
        raise SimulationError("simulation produced no completed cases")
    return log, kpis, report
