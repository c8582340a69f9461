"""Synthetic differentiated models for experiments and the acceptance suite.

The round-trip experiment model has 15 activities (one exclusive and one
parallel block inside a chain), resources spread over four disjoint-ish
weekly calendars including a part-time one, and a distinct exponential
processing-time mean per resource. An undifferentiated rediscovery of a log
produced by this model must smear both the calendars and the speeds, which
is exactly the effect the round-trip comparison measures.
"""

from __future__ import annotations

from .calendars import WeeklyCalendar
from .distributions import DistributionSpec
from .model import (
    BranchingProbabilities,
    DifferentiatedSimModel,
    Flow,
    GatewayKind,
    ProcessGraph,
    ResourceProfile,
)

ACTIVITY_COUNT = 15

_BASE_MEANS = (240, 300, 420, 360, 480, 300, 540, 600, 360, 450, 330, 510, 390, 270, 600)

_CALENDARS = (
    ("early", WeeklyCalendar.workweek("06:00:00", "14:00:00")),
    ("core", WeeklyCalendar.workweek("09:00:00", "17:00:00")),
    ("late", WeeklyCalendar.workweek("12:00:00", "20:00:00")),
    ("part_time", WeeklyCalendar.workweek("09:00:00", "13:00:00")),
)


def experiment_graph() -> ProcessGraph:
    """Chain of 15 activities with one exclusive and one parallel block."""
    labels = [f"act{i:02d}" for i in range(1, ACTIVITY_COUNT + 1)]
    nodes = {f"n{i:02d}": label for i, label in enumerate(labels, start=1)}
    flows = [
        Flow("f_start", "start", "n01"),
        Flow("f01", "n01", "n02"),
        Flow("f02", "n02", "xsplit"),
        Flow("fx_a", "xsplit", "n03"),
        Flow("fx_b", "xsplit", "n04"),
        Flow("fx_a2", "n03", "xjoin"),
        Flow("fx_b2", "n04", "xjoin"),
        Flow("f05", "xjoin", "n05"),
        Flow("f06", "n05", "asplit"),
        Flow("fa_a", "asplit", "n06"),
        Flow("fa_b", "asplit", "n07"),
        Flow("fa_a2", "n06", "ajoin"),
        Flow("fa_b2", "n07", "ajoin"),
        Flow("f08", "ajoin", "n08"),
    ]
    for i in range(8, ACTIVITY_COUNT):
        flows.append(Flow(f"f{i + 1:02d}", f"n{i:02d}", f"n{i + 1:02d}"))
    flows.append(Flow("f_end", f"n{ACTIVITY_COUNT:02d}", "end"))
    return ProcessGraph(
        start_event="start",
        end_events={"end"},
        activities=nodes,
        gateways={
            "xsplit": GatewayKind.EXCLUSIVE_SPLIT,
            "xjoin": GatewayKind.EXCLUSIVE_JOIN,
            "asplit": GatewayKind.PARALLEL_SPLIT,
            "ajoin": GatewayKind.PARALLEL_JOIN,
        },
        flows=flows,
    )


def experiment_model(
    n_resources: int = 20, arrival_mean: float = 5200.0
) -> DifferentiatedSimModel:
    """The round-trip experiment model.

    Each activity is shared by two resources; every resource has its own
    speed factor and one of four weekly calendars (one of them part time).
    The default arrival rate keeps the bottleneck activities below saturation.
    """
    graph = experiment_graph()
    labels = sorted(graph.activity_labels)
    # the intake activity runs on a 24/7 automated pair, so case starts track
    # the raw arrival process; the remaining 14 activities are human work
    intake, human_labels = labels[0], labels[1:]
    alloc: dict[str, set[str]] = {f"r{k:02d}": set() for k in range(1, n_resources + 1)}
    means: dict[str, dict[str, float]] = {r: {} for r in alloc}
    # walk the resource list so every resource executes something; the first
    # activities take a third executor when there are spare resources
    spare = max(0, n_resources - 2 * len(human_labels))
    pointer = 0
    for i, label in enumerate(human_labels):
        executors = 3 if i < spare else 2
        for j in range(executors):
            k = pointer % n_resources
            pointer += 1
            r = f"r{k + 1:02d}"
            factor = 0.7 + 0.03 * (k + j)
            alloc[r].add(label)
            means[r][label] = _BASE_MEANS[i + 1] * factor
    profiles = [
        ResourceProfile(
            id=f"bot{b}",
            alloc=frozenset({intake}),
            perf={intake: DistributionSpec("exponential", (90.0 + 30.0 * b,))},
            avail=WeeklyCalendar.full_time(),
            cost_per_hour=1.0,
        )
        for b in (1, 2)
    ]
    for k, (resource, activities) in enumerate(sorted(alloc.items())):
        _, calendar = _CALENDARS[k % len(_CALENDARS)]
        profiles.append(
            ResourceProfile(
                id=resource,
                alloc=frozenset(activities),
                perf={
                    a: DistributionSpec("exponential", (means[resource][a],))
                    for a in activities
                },
                avail=calendar,
                cost_per_hour=20.0 + k,
            )
        )
    return DifferentiatedSimModel(
        graph=graph,
        profiles=profiles,
        bp=BranchingProbabilities(graph, {"fx_a": 0.55, "fx_b": 0.45}),
        at=DistributionSpec("uniform", (0.8 * arrival_mean, 1.2 * arrival_mean)),
        ac=WeeklyCalendar.full_time(),
    )
