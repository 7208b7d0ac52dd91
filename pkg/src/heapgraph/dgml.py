"""DGML export for abstract and reduced graphs.

Rendering conventions: the root is never drawn (variables appear as their own
small nodes), edges that only reach null are dropped, an edge whose label can
also reach null is dashed, non-injective edges are wide and orange, nodes
summarizing a single object are white while summaries are shaded, and
container nodes carry their shared length in the label.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .abstract_graph import AbstractGraph
from .diagnostics import NodeMetrics, Finding, heat_bucket
from .heap_model import TREE
from .reduction import ReducedGraph

DGML_NS = "http://schemas.microsoft.com/vs/2009/dgml"


@dataclass(frozen=True)
class StyleConfig:
    """Visual toggles and constants; the defaults reproduce the standard look."""

    heat: bool = False
    diagnostics: bool = False
    collapse_multi_edges: bool = True
    single_background: str = "White"
    summary_background: str = "Silver"
    noninjective_stroke: str = "Orange"
    noninjective_thickness: str = "3"
    maybe_null_dash: str = "2 2"
    heat_colors: dict = field(default_factory=lambda: {
        "hot5": "#FFD700", "hot15": "#FF8C00", "hot25": "#FF4500"})
    finding_stroke: str = "Red"


DEFAULT_STYLES = StyleConfig()


def _node_label(types: frozenset[str], length: int | None) -> str:
    if not types:
        return "(untyped)"
    if length is not None and len(types) == 1:
        name = next(iter(types))
        if name.endswith("[]"):
            return f"{name[:-2]}[{length}]"
        return f"{name}[{length}]"
    return ", ".join(sorted(types))


def _shape_label(g: AbstractGraph, node_id: int) -> str | None:
    facts = g.shape_facts(node_id)
    trees = [f for f in facts if f.shape == TREE and f.labels]
    if trees:
        best = max(trees, key=lambda f: (len(f.labels), sorted(f.labels)))
        return "tree{" + ", ".join(sorted(best.labels)) + "}"
    anys = [f for f in facts if f.labels]
    if anys:
        return "any{" + ", ".join(sorted(anys[0].labels)) + "}"
    return None


def export_dgml(g, styles: StyleConfig = DEFAULT_STYLES,
                metrics: list[NodeMetrics] | None = None,
                container_lengths: dict[int, int] | None = None,
                findings: list[Finding] | None = None) -> str:
    """Serialize an AbstractGraph or ReducedGraph to a DGML document."""
    if isinstance(g, ReducedGraph):
        return _export_reduced(g, styles)
    if isinstance(g, AbstractGraph):
        return _export_abstract(g, styles, metrics, container_lengths, findings)
    raise TypeError(f"cannot export {type(g).__name__} as DGML")


def _doc() -> tuple[ET.Element, ET.Element, ET.Element]:
    root = ET.Element("DirectedGraph", {"xmlns": DGML_NS})
    nodes = ET.SubElement(root, "Nodes")
    links = ET.SubElement(root, "Links")
    return root, nodes, links


def _tostring(root: ET.Element) -> str:
    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"


def _export_abstract(g: AbstractGraph, styles: StyleConfig,
                     metrics: list[NodeMetrics] | None,
                     container_lengths: dict[int, int] | None,
                     findings: list[Finding] | None) -> str:
    root, nodes_el, links_el = _doc()
    by_node_metrics = {m.node: m for m in metrics} if metrics else {}
    flagged = {f.node for f in findings} if findings else set()
    lengths = container_lengths or {}

    for nid in g.content_ids():
        node = g.node(nid)
        attrs = {"Id": f"n{nid}",
                 "Label": _node_label(node.types, lengths.get(nid))}
        background = (styles.single_background
                      if node.card.lo == node.card.hi == 1
                      else styles.summary_background)
        if styles.heat and nid in by_node_metrics:
            bucket = heat_bucket(by_node_metrics[nid])
            if bucket:
                background = styles.heat_colors[bucket]
        attrs["Background"] = background
        shape = _shape_label(g, nid)
        if shape and not styles.collapse_multi_edges:
            attrs["ShapeInfo"] = shape
        if styles.diagnostics and nid in flagged:
            attrs["Stroke"] = styles.finding_stroke
        ET.SubElement(nodes_el, "Node", attrs)

    for e in sorted(g.var_edges(), key=lambda e: e.label):
        ET.SubElement(nodes_el, "Node",
                      {"Id": f"var_{e.label}", "Label": e.label,
                       "Background": styles.single_background})
        if e.tgt != g.null:
            ET.SubElement(links_el, "Link",
                          {"Source": f"var_{e.label}", "Target": f"n{e.tgt}"})

    null_labels: dict[int, set[str]] = {}
    for e in g.edges:
        if e.tgt == g.null and e.src != g.root:
            null_labels.setdefault(e.src, set()).add(e.label)

    drawable = [e for e in g.edges if e.src != g.root and e.tgt != g.null]
    if styles.collapse_multi_edges:
        grouped: dict[tuple[int, int], list] = {}
        for e in drawable:
            grouped.setdefault((e.src, e.tgt), []).append(e)
        for (src, tgt), group in sorted(grouped.items()):
            labels = sorted(e.label for e in group)
            if src == tgt:
                label = _shape_label(g, src) or ", ".join(labels)
            else:
                label = ", ".join(labels)
            _emit_link(links_el, g, styles, src, tgt, label,
                       injective=all(e.injective for e in group),
                       maybe_null=any(l in null_labels.get(src, ())
                                      for l in labels))
    else:
        for e in drawable:
            _emit_link(links_el, g, styles, e.src, e.tgt, e.label,
                       injective=e.injective,
                       maybe_null=e.label in null_labels.get(e.src, ()))
    return _tostring(root)


def _emit_link(links_el: ET.Element, g: AbstractGraph, styles: StyleConfig,
               src: int, tgt: int, label: str, injective: bool,
               maybe_null: bool) -> None:
    attrs = {"Source": f"n{src}", "Target": f"n{tgt}", "Label": label}
    if not injective:
        attrs["StrokeThickness"] = styles.noninjective_thickness
        attrs["Stroke"] = styles.noninjective_stroke
    if maybe_null:
        attrs["StrokeDashArray"] = styles.maybe_null_dash
    ET.SubElement(links_el, "Link", attrs)


def _export_reduced(r: ReducedGraph, styles: StyleConfig) -> str:
    from .reduction import NULL_REDUCED, ROOT_REDUCED

    root, nodes_el, links_el = _doc()
    for rid in sorted(r.nodes):
        if rid in (ROOT_REDUCED, NULL_REDUCED):
            continue
        rn = r.nodes[rid]
        attrs = {"Id": f"r{rid}", "Label": _node_label(rn.types, None)}
        if rn.unreachable:
            attrs["Label"] = "(unreachable) " + attrs["Label"]
        if len(rn.covered) > 1:
            attrs["Group"] = "Collapsed"
        attrs["Background"] = (styles.single_background
                               if rn.card.lo == rn.card.hi == 1
                               else styles.summary_background)
        ET.SubElement(nodes_el, "Node", attrs)
    for name, rid in r.var_edges:
        ET.SubElement(nodes_el, "Node",
                      {"Id": f"var_{name}", "Label": name,
                       "Background": styles.single_background})
        if rid != NULL_REDUCED:
            ET.SubElement(links_el, "Link",
                          {"Source": f"var_{name}", "Target": f"r{rid}"})
    for src, tgt in r.edges:
        if tgt == NULL_REDUCED or src == ROOT_REDUCED:
            continue
        ET.SubElement(links_el, "Link", {"Source": f"r{src}", "Target": f"r{tgt}"})
    return _tostring(root)
