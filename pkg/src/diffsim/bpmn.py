"""Parsing of the supported BPMN 2.0 XML subset into a process graph.

Recognized flow elements: startEvent, endEvent, task, exclusiveGateway,
parallelGateway, sequenceFlow. Any other element of the BPMN model
namespace is rejected by name; diagram-interchange elements (BPMNDI/DI/DC
namespaces) are layout-only and ignored.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .model import Flow, GatewayKind, ModelError, ProcessGraph

_DIAGRAM_NAMESPACES = (
    "http://www.omg.org/spec/BPMN/20100524/DI",
    "http://www.omg.org/spec/DD/20100524/DI",
    "http://www.omg.org/spec/DD/20100524/DC",
)

# structural child elements of flow nodes that carry no semantics we need
_IGNORED_LOCAL = {"documentation", "extensionElements", "incoming", "outgoing"}

_SUPPORTED_NODES = {"startEvent", "endEvent", "task", "exclusiveGateway", "parallelGateway"}


class BpmnParseError(ValueError):
    pass


class UnsupportedElementError(BpmnParseError):
    def __init__(self, element_name: str):
        super().__init__(f"unsupported BPMN element: {element_name}")
        self.element_name = element_name


def _local(tag: str) -> tuple[str, str]:
    """Split '{ns}local' into (ns, local)."""
    if tag.startswith("{"):
        ns, _, local = tag[1:].partition("}")
        return ns, local
    return "", tag


def parse_bpmn(xml_text: str) -> ProcessGraph:
    """Parse one process from BPMN XML into a validated ProcessGraph."""
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise BpmnParseError(f"malformed XML: {exc}") from exc

    _, root_local = _local(root.tag)
    if root_local == "process":
        processes = [root]
    else:
        processes = [el for el in root if _local(el.tag)[1] == "process"]
        for el in root:
            ns, local = _local(el.tag)
            if ns in _DIAGRAM_NAMESPACES or local in ("process",) or local in _IGNORED_LOCAL:
                continue
            raise UnsupportedElementError(local)
    if len(processes) != 1:
        raise BpmnParseError(f"expected exactly one process element, found {len(processes)}")
    process = processes[0]

    start_events: list[str] = []
    end_events: list[str] = []
    activities: dict[str, str] = {}
    gateway_types: dict[str, str] = {}
    flows: list[Flow] = []
    counter = 0

    def node_id(el: ET.Element, prefix: str) -> str:
        nonlocal counter
        nid = el.get("id")
        if nid:
            return nid
        counter += 1
        return f"_{prefix}{counter}"

    for el in process:
        ns, local = _local(el.tag)
        if ns in _DIAGRAM_NAMESPACES or local in _IGNORED_LOCAL:
            continue
        if local == "startEvent":
            start_events.append(node_id(el, "start"))
        elif local == "endEvent":
            end_events.append(node_id(el, "end"))
        elif local == "task":
            nid = node_id(el, "task")
            activities[nid] = el.get("name") or nid
        elif local in ("exclusiveGateway", "parallelGateway"):
            gateway_types[node_id(el, "gw")] = local
        elif local == "sequenceFlow":
            source = el.get("sourceRef")
            target = el.get("targetRef")
            if not source or not target:
                raise BpmnParseError("sequenceFlow without sourceRef/targetRef")
            flows.append(Flow(node_id(el, "flow"), source, target))
        else:
            raise UnsupportedElementError(local)

    if len(start_events) != 1:
        raise ModelError(f"expected exactly one start event, found {len(start_events)}")

    n_in = {f.target: 0 for f in flows}
    n_out = {f.source: 0 for f in flows}
    for f in flows:
        n_in[f.target] = n_in.get(f.target, 0) + 1
        n_out[f.source] = n_out.get(f.source, 0) + 1

    gateways: dict[str, GatewayKind] = {}
    for gid, kind in gateway_types.items():
        incoming = n_in.get(gid, 0)
        outgoing = n_out.get(gid, 0)
        if incoming >= 2 and outgoing >= 2:
            raise ModelError(f"mixed split/join gateway {gid} is not supported")
        is_split = outgoing >= 2
        if kind == "exclusiveGateway":
            gateways[gid] = GatewayKind.EXCLUSIVE_SPLIT if is_split else GatewayKind.EXCLUSIVE_JOIN
        else:
            gateways[gid] = GatewayKind.PARALLEL_SPLIT if is_split else GatewayKind.PARALLEL_JOIN

    return ProcessGraph(
        start_event=start_events[0],
        end_events=set(end_events),
        activities=activities,
        gateways=gateways,
        flows=flows,
    )


def write_bpmn(graph: ProcessGraph) -> str:
    """Serialize a graph back to the supported BPMN subset
    (parse_bpmn(write_bpmn(g)) is structurally equal to g)."""
    from xml.sax.saxutils import quoteattr

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL">',
        '  <process id="process_1">',
        f'    <startEvent id={quoteattr(graph.start_event)}/>',
    ]
    for end in sorted(graph.end_events):
        lines.append(f"    <endEvent id={quoteattr(end)}/>")
    for node, label in graph.activities.items():
        lines.append(f"    <task id={quoteattr(node)} name={quoteattr(label)}/>")
    for node, kind in graph.gateways.items():
        tag = "exclusiveGateway" if kind in (GatewayKind.EXCLUSIVE_SPLIT, GatewayKind.EXCLUSIVE_JOIN) else "parallelGateway"
        lines.append(f"    <{tag} id={quoteattr(node)}/>")
    for f in graph.flows:
        lines.append(
            f"    <sequenceFlow id={quoteattr(f.id)} "
            f"sourceRef={quoteattr(f.source)} targetRef={quoteattr(f.target)}/>"
        )
    lines += ["  </process>", "</definitions>", ""]
    return "\n".join(lines)
