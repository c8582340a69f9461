"""Simulation-model data types: the control-flow graph, resource profiles,
classic pooled models, and their differentiated counterpart."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .calendars import WeeklyCalendar
from .distributions import DistributionSpec

PROB_TOLERANCE = 1e-6


class ModelError(ValueError):
    """A model that violates a structural invariant where data repair is impossible."""


class GatewayKind(str, Enum):
    EXCLUSIVE_SPLIT = "exclusive-split"
    EXCLUSIVE_JOIN = "exclusive-join"
    PARALLEL_SPLIT = "parallel-split"
    PARALLEL_JOIN = "parallel-join"


@dataclass(frozen=True)
class Flow:
    id: str
    source: str
    target: str


class ProcessGraph:
    """Control-flow skeleton over which tokens move.

    Structural invariants are enforced at construction: exactly one start
    event, at least one end event, all nodes reachable from the start,
    splits with >=2 outgoing arcs, joins with >=2 incoming arcs, and every
    activity with exactly one incoming and one outgoing arc. Activity
    labels must be unique (logs reference activities by label).
    """

    def __init__(
        self,
        start_event: str,
        end_events: set[str],
        activities: dict[str, str],
        gateways: dict[str, GatewayKind],
        flows: list[Flow],
    ):
        self.start_event = start_event
        self.end_events = frozenset(end_events)
        self.activities = dict(activities)  # node id -> label
        self.gateways = dict(gateways)
        self.flows = tuple(flows)
        self.outgoing: dict[str, list[Flow]] = {}
        self.incoming: dict[str, list[Flow]] = {}
        for f in self.flows:
            self.outgoing.setdefault(f.source, []).append(f)
            self.incoming.setdefault(f.target, []).append(f)
        self.label_to_id = {}
        for node, label in self.activities.items():
            if label in self.label_to_id:
                raise ModelError(f"duplicate activity label: {label!r}")
            self.label_to_id[label] = node
        self.flow_by_id = {f.id: f for f in self.flows}
        self._check()

    def _check(self) -> None:
        nodes = {self.start_event, *self.end_events, *self.activities, *self.gateways}
        if self.start_event in self.end_events:
            raise ModelError("start event cannot also be an end event")
        for f in self.flows:
            if f.source not in nodes or f.target not in nodes:
                raise ModelError(f"flow {f.id} references unknown node")
        if self.incoming.get(self.start_event):
            raise ModelError("start event has incoming flows")
        if len(self.outgoing.get(self.start_event, [])) != 1:
            raise ModelError("start event must have exactly one outgoing flow")
        if not self.end_events:
            raise ModelError("no end event")
        for e in self.end_events:
            if self.outgoing.get(e):
                raise ModelError(f"end event {e} has outgoing flows")
        for a in self.activities:
            if len(self.incoming.get(a, [])) != 1 or len(self.outgoing.get(a, [])) != 1:
                raise ModelError(f"activity {a} must have exactly one incoming and one outgoing flow")
        for g, kind in self.gateways.items():
            n_in = len(self.incoming.get(g, []))
            n_out = len(self.outgoing.get(g, []))
            if kind in (GatewayKind.EXCLUSIVE_SPLIT, GatewayKind.PARALLEL_SPLIT):
                if n_out < 2 or n_in != 1:
                    raise ModelError(f"split gateway {g} must have 1 incoming and >=2 outgoing flows")
            else:
                if n_in < 2 or n_out != 1:
                    raise ModelError(f"join gateway {g} must have >=2 incoming and 1 outgoing flow")
        # reachability from the start event
        seen = {self.start_event}
        frontier = [self.start_event]
        while frontier:
            node = frontier.pop()
            for f in self.outgoing.get(node, []):
                if f.target not in seen:
                    seen.add(f.target)
                    frontier.append(f.target)
        unreachable = nodes - seen
        if unreachable:
            raise ModelError(f"nodes unreachable from start: {sorted(unreachable)}")

    @property
    def activity_labels(self) -> set[str]:
        return set(self.label_to_id)

    def exclusive_splits(self) -> list[str]:
        return [g for g, k in self.gateways.items() if k == GatewayKind.EXCLUSIVE_SPLIT]

    def structurally_equal(self, other: "ProcessGraph") -> bool:
        return (
            self.start_event == other.start_event
            and self.end_events == other.end_events
            and self.activities == other.activities
            and self.gateways == other.gateways
            and set(self.flows) == set(other.flows)
        )


class BranchingProbabilities:
    """Probability per outgoing arc of each exclusive split.

    Probabilities of one gateway must sum to 1 within 1e-6; they are
    renormalized exactly on construction, rejected beyond the tolerance.
    """

    def __init__(self, graph: ProcessGraph, arc_probabilities: dict[str, float]):
        self.by_arc: dict[str, float] = {}
        for gw in graph.exclusive_splits():
            arcs = graph.outgoing[gw]
            probs = []
            for f in arcs:
                if f.id not in arc_probabilities:
                    raise ModelError(f"missing branching probability for arc {f.id} of gateway {gw}")
                p = float(arc_probabilities[f.id])
                if not 0.0 <= p <= 1.0 + PROB_TOLERANCE:
                    raise ModelError(f"branching probability out of [0,1] on arc {f.id}")
                probs.append(p)
            total = sum(probs)
            if abs(total - 1.0) > PROB_TOLERANCE:
                raise ModelError(f"branching probabilities of gateway {gw} sum to {total}")
            for f, p in zip(arcs, probs):
                self.by_arc[f.id] = p / total
        extra = set(arc_probabilities) - set(self.by_arc)
        if extra:
            raise ModelError(f"probabilities given for arcs not leaving an exclusive split: {sorted(extra)}")

    def probability(self, arc_id: str) -> float:
        return self.by_arc[arc_id]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BranchingProbabilities) and self.by_arc == other.by_arc

    def to_json(self) -> list[dict]:
        return [{"arc": a, "probability": p} for a, p in sorted(self.by_arc.items())]

    @classmethod
    def uniform(cls, graph: ProcessGraph) -> "BranchingProbabilities":
        probs: dict[str, float] = {}
        for gw in graph.exclusive_splits():
            arcs = graph.outgoing[gw]
            for f in arcs:
                probs[f.id] = 1.0 / len(arcs)
        return cls(graph, probs)


@dataclass(frozen=True)
class ResourceProfile:
    """One individually modeled resource: what it can do, how fast, and when."""

    id: str
    alloc: frozenset[str]  # activity labels
    perf: dict  # activity label -> DistributionSpec
    avail: WeeklyCalendar
    cost_per_hour: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "alloc", frozenset(self.alloc))
        object.__setattr__(self, "perf", dict(self.perf))


@dataclass
class DifferentiatedSimModel:
    graph: ProcessGraph
    profiles: list[ResourceProfile]
    bp: BranchingProbabilities
    at: DistributionSpec
    ac: WeeklyCalendar


@dataclass(frozen=True)
class ResourcePool:
    id: str
    size: int
    avail: WeeklyCalendar
    cost_per_hour: float = 0.0


@dataclass
class ClassicSimModel:
    """Pooled model: undifferentiated resources inside disjoint pools."""

    graph: ProcessGraph
    pools: list[ResourcePool]
    alloc: dict[str, str]  # activity label -> pool id
    pt: dict[str, DistributionSpec]  # activity label -> processing time
    bp: BranchingProbabilities
    at: DistributionSpec
    ac: WeeklyCalendar


def validate_model(model: DifferentiatedSimModel) -> list[str]:
    """Invariant check; returns one message per violation (empty = valid)."""
    violations: list[str] = []
    seen_ids: set[str] = set()
    for prof in model.profiles:
        if prof.id in seen_ids:
            violations.append(f"duplicate resource profile id {prof.id!r}")
        seen_ids.add(prof.id)
        if set(prof.perf) != set(prof.alloc):
            violations.append(
                f"profile {prof.id!r}: performance keys {sorted(prof.perf)} "
                f"do not match allocated activities {sorted(prof.alloc)}"
            )
        if prof.avail.is_empty:
            violations.append(f"profile {prof.id!r} has an empty availability calendar")
        unknown = prof.alloc - model.graph.activity_labels
        for label in sorted(unknown):
            violations.append(f"profile {prof.id!r} allocated to unknown activity {label!r}")
    allocated = set().union(*(p.alloc for p in model.profiles)) if model.profiles else set()
    for label in sorted(model.graph.activity_labels - allocated):
        violations.append(f"unallocated activity {label!r}")
    # branching coverage against the graph it was built for
    for gw in model.graph.exclusive_splits():
        total = 0.0
        for f in model.graph.outgoing[gw]:
            if f.id not in model.bp.by_arc:
                violations.append(f"gateway {gw}: no probability for arc {f.id}")
            else:
                total += model.bp.by_arc[f.id]
        if abs(total - 1.0) > PROB_TOLERANCE:
            violations.append(f"gateway {gw}: probabilities sum {total:.6g}")
    return violations


def classic_to_differentiated(model: ClassicSimModel) -> DifferentiatedSimModel:
    """Expand each pool of size k into k identical resource profiles.

    Profiles share the pool's calendar, cost, and per-activity
    distributions; the conversion is semantics preserving (simulating the
    result equals simulating an equivalent hand-built differentiated model).
    """
    pool_ids = [p.id for p in model.pools]
    if len(set(pool_ids)) != len(pool_ids):
        raise ModelError("pool ids must be unique")
    pool_activities: dict[str, set[str]] = {p.id: set() for p in model.pools}
    for activity, pool_id in model.alloc.items():
        if pool_id not in pool_activities:
            raise ModelError(f"activity {activity!r} allocated to unknown pool {pool_id!r}")
        pool_activities[pool_id].add(activity)
    profiles: list[ResourceProfile] = []
    for pool in model.pools:
        if pool.size < 1:
            raise ModelError(f"pool {pool.id!r} has size {pool.size}")
        acts = pool_activities[pool.id]
        perf = {a: model.pt[a] for a in acts}
        for k in range(1, pool.size + 1):
            profiles.append(
                ResourceProfile(
                    id=f"{pool.id}_{k}",
                    alloc=frozenset(acts),
                    perf=perf,
                    avail=pool.avail,
                    cost_per_hour=pool.cost_per_hour,
                )
            )
    diff = DifferentiatedSimModel(
        graph=model.graph, profiles=profiles, bp=model.bp, at=model.at, ac=model.ac
    )
    problems = validate_model(diff)
    if problems:
        raise ModelError("invalid classic model: " + "; ".join(problems))
    return diff
