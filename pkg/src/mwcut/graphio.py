"""JSON instance format and Graphviz DOT export."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable

from .errors import GraphError
from .graph import EDGE, Instance, MultiGraph, as_weight


def graph_to_obj(g: MultiGraph) -> dict:
    obj = {
        "vertices": [
            {"id": v, "label": g.labels[v]} if v in g.labels else {"id": v} for v in g.vertices
        ],
        "edges": [{"id": e.id, "u": e.u, "v": e.v, "w": str(e.w)} for e in g.edges],
    }
    if g.rotation is not None:
        obj["rotation"] = {str(v): list(order) for v, order in sorted(g.rotation.items())}
    if g.provenance:
        obj["provenance"] = {str(k): v for k, v in sorted(g.provenance.items())}
    return obj


def graph_from_obj(obj: dict) -> MultiGraph:
    try:
        vertices = [int(v["id"]) for v in obj["vertices"]]
        labels = {int(v["id"]): v["label"] for v in obj["vertices"] if "label" in v}
        edges = [(int(e["id"]), int(e["u"]), int(e["v"]), as_weight(str(e.get("w", "1")))) for e in obj["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"malformed graph JSON: {exc}") from exc
    rotation = None
    if obj.get("rotation") is not None:
        rotation = {int(k): tuple(int(x) for x in order) for k, order in obj["rotation"].items()}
    prov = {int(k): (None if v is None else int(v)) for k, v in obj.get("provenance", {}).items()}
    return MultiGraph.build(vertices, edges, labels=labels, rotation=rotation, provenance=prov)


def instance_to_obj(inst: Instance) -> dict:
    obj = graph_to_obj(inst.graph)
    obj["terminals"] = list(inst.terminals)
    obj["k"] = str(inst.budget)
    obj["kind"] = inst.kind
    return obj


def instance_from_obj(obj: dict) -> Instance:
    g = graph_from_obj(obj)
    return Instance(
        g,
        tuple(int(t) for t in obj.get("terminals", [])),
        as_weight(str(obj.get("k", "0"))),
        obj.get("kind", EDGE),
    )


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def instance_to_json(inst: Instance) -> str:
    return dumps(instance_to_obj(inst))


def instance_from_json(text: str) -> Instance:
    return instance_from_obj(json.loads(text))


def to_dot(
    inst: Instance,
    cut: Iterable[int] = (),
    honeycomb_edges: Iterable[int] = (),
    name: str = "G",
) -> str:
    """Render terminals as red boxes, cut elements green and honeycomb edges gray."""
    g = inst.graph
    cut = set(cut)
    gray = set(honeycomb_edges)
    ts = set(inst.terminals)
    node_cut = inst.kind != EDGE
    lines = [f"graph {name} {{", "  node [shape=circle, fontsize=9];"]
    for v in g.vertices:
        attrs = [f'label="{g.labels.get(v, v)}"']
        if v in ts:
            attrs += ["shape=box", "color=red", "style=filled", "fillcolor=\"#ffcccc\""]
        if node_cut and v in cut:
            attrs += ["penwidth=3", "color=green"]
        lines.append(f"  {v} [{', '.join(attrs)}];")
    for e in g.edges:
        attrs = []
        if e.w != 1:
            attrs.append(f'label="{e.w}"')
        if not node_cut and e.id in cut:
            attrs += ["color=green", "penwidth=3"]
        elif e.id in gray:
            attrs.append("color=gray")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {e.u} -- {e.v}{suffix};  // e{e.id}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def fraction_str(x: Fraction | int) -> str:
    return str(Fraction(x))
