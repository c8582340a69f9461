from datetime import datetime, timedelta

import pytest

from diffsim import (
    BranchingProbabilities,
    DifferentiatedSimModel,
    DistributionSpec,
    Flow,
    GatewayKind,
    ProcessGraph,
    ResourceProfile,
    WeeklyCalendar,
)

MONDAY = datetime(2022, 1, 3)  # 2022-01-03 is a Monday


def ts(day_offset: int = 0, hour: int = 0, minute: int = 0, second: int = 0) -> datetime:
    """Timestamp relative to the Monday anchor."""
    return MONDAY + timedelta(days=day_offset, hours=hour, minutes=minute, seconds=second)


def linear_graph(labels: list[str]) -> ProcessGraph:
    """start -> a1 -> a2 -> ... -> end"""
    flows = []
    nodes = ["start"] + [f"n{i}" for i in range(len(labels))] + ["end"]
    for i in range(len(nodes) - 1):
        flows.append(Flow(f"f{i}", nodes[i], nodes[i + 1]))
    return ProcessGraph(
        start_event="start",
        end_events={"end"},
        activities={f"n{i}": label for i, label in enumerate(labels)},
        gateways={},
        flows=flows,
    )


def xor_graph(p_a: float = 0.5) -> tuple[ProcessGraph, BranchingProbabilities]:
    """start -> split -> (A | B) -> join -> end"""
    graph = ProcessGraph(
        start_event="start",
        end_events={"end"},
        activities={"nA": "A", "nB": "B"},
        gateways={"split": GatewayKind.EXCLUSIVE_SPLIT, "join": GatewayKind.EXCLUSIVE_JOIN},
        flows=[
            Flow("f0", "start", "split"),
            Flow("fa", "split", "nA"),
            Flow("fb", "split", "nB"),
            Flow("fa2", "nA", "join"),
            Flow("fb2", "nB", "join"),
            Flow("f3", "join", "end"),
        ],
    )
    bp = BranchingProbabilities(graph, {"fa": p_a, "fb": 1 - p_a})
    return graph, bp


def and_graph() -> ProcessGraph:
    """start -> split -> (A || B) -> join -> end"""
    return ProcessGraph(
        start_event="start",
        end_events={"end"},
        activities={"nA": "A", "nB": "B"},
        gateways={"split": GatewayKind.PARALLEL_SPLIT, "join": GatewayKind.PARALLEL_JOIN},
        flows=[
            Flow("f0", "start", "split"),
            Flow("fa", "split", "nA"),
            Flow("fb", "split", "nB"),
            Flow("fa2", "nA", "join"),
            Flow("fb2", "nB", "join"),
            Flow("f3", "join", "end"),
        ],
    )


def single_task_model(
    duration: DistributionSpec | None = None,
    calendar: WeeklyCalendar | None = None,
    arrival: DistributionSpec | None = None,
    arrival_calendar: WeeklyCalendar | None = None,
    n_resources: int = 1,
) -> DifferentiatedSimModel:
    graph = linear_graph(["work"])
    cal = calendar if calendar is not None else WeeklyCalendar.full_time()
    dist = duration if duration is not None else DistributionSpec("fixed", (600,))
    profiles = [
        ResourceProfile(id=f"r{i + 1}", alloc={"work"}, perf={"work": dist}, avail=cal)
        for i in range(n_resources)
    ]
    return DifferentiatedSimModel(
        graph=graph,
        profiles=profiles,
        bp=BranchingProbabilities(graph, {}),
        at=arrival if arrival is not None else DistributionSpec("fixed", (0,)),
        ac=arrival_calendar if arrival_calendar is not None else WeeklyCalendar.full_time(),
    )


@pytest.fixture
def workweek() -> WeeklyCalendar:
    return WeeklyCalendar.workweek("09:00:00", "17:00:00")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
