"""Scenario files: the JSON-serialized simulation model minus its graph.

The graph always travels separately as BPMN XML; activities inside the
scenario are referenced by label, branching probabilities by arc id. The
format is documented in the README (all durations in seconds, calendar
entries as weekday/beginTime/endTime triples).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .calendars import WeeklyCalendar
from .distributions import DistributionSpec
from .model import (
    BranchingProbabilities,
    DifferentiatedSimModel,
    ProcessGraph,
    ResourceProfile,
    validate_model,
)


class ScenarioError(ValueError):
    pass


@dataclass
class ScenarioBundle:
    graph: ProcessGraph
    model: DifferentiatedSimModel
    provenance: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.model.graph is not self.graph and not self.model.graph.structurally_equal(self.graph):
            raise ScenarioError("bundle graph differs from the model's graph")


def store_scenario(model: DifferentiatedSimModel, provenance: dict | None = None) -> str:
    """Serialize a model (minus the graph) to scenario JSON text."""
    doc = scenario_dict(model)
    if provenance:
        doc["provenance"] = provenance
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def scenario_dict(model: DifferentiatedSimModel) -> dict:
    return {
        "resource_profiles": [
            {
                "id": p.id,
                "cost_per_hour": p.cost_per_hour,
                "calendar": p.avail.to_json(),
                "performance": [
                    {"activity": a, "distribution": p.perf[a].to_json()}
                    for a in sorted(p.alloc)
                ],
            }
            for p in model.profiles
        ],
        "arrival": {
            "distribution": model.at.to_json(),
            "calendar": model.ac.to_json(),
        },
        "branching": model.bp.to_json(),
    }


def load_scenario(json_text: str, graph: ProcessGraph) -> DifferentiatedSimModel:
    """Parse scenario JSON against a parsed graph; the result passes
    validate_model or loading fails."""
    try:
        doc = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"malformed scenario JSON: {exc}") from exc
    return model_from_dict(doc, graph)


def model_from_dict(doc: dict, graph: ProcessGraph) -> DifferentiatedSimModel:
    try:
        profiles = [_profile_from_json(p, graph) for p in doc["resource_profiles"]]
        arrival = doc["arrival"]
        at = DistributionSpec.from_json(arrival["distribution"])
        ac = WeeklyCalendar.from_json(arrival["calendar"])
        arc_probs = {item["arc"]: float(item["probability"]) for item in doc.get("branching", [])}
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"bad scenario document: {exc}") from exc
    unknown_arcs = set(arc_probs) - set(graph.flow_by_id)
    if unknown_arcs:
        raise ScenarioError(f"branching references unknown arcs: {sorted(unknown_arcs)}")
    try:
        bp = BranchingProbabilities(graph, arc_probs)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc
    model = DifferentiatedSimModel(graph=graph, profiles=profiles, bp=bp, at=at, ac=ac)
    violations = validate_model(model)
    if violations:
        raise ScenarioError("invalid scenario: " + "; ".join(violations))
    return model


def _profile_from_json(obj: dict, graph: ProcessGraph) -> ResourceProfile:
    perf: dict[str, DistributionSpec] = {}
    for item in obj.get("performance", []):
        activity = item["activity"]
        if activity not in graph.activity_labels:
            raise ScenarioError(
                f"profile {obj.get('id')!r} references unknown activity {activity!r}"
            )
        perf[activity] = DistributionSpec.from_json(item["distribution"])
    return ResourceProfile(
        id=str(obj["id"]),
        alloc=frozenset(perf),
        perf=perf,
        avail=WeeklyCalendar.from_json(obj.get("calendar", [])),
        cost_per_hour=float(obj.get("cost_per_hour", 0.0)),
    )
