"""DGML export: conventions, styling toggles, and schema shape."""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET

import pytest

from heapgraph import (StyleConfig, abstract_heap, build_fixture,
                       compute_metrics, container_lengths, export_dgml,
                       parse_snapshot, reduce)
from heapgraph.dgml import DGML_NS

NS = {"d": DGML_NS}


def exprtree_dgml(styles=StyleConfig(), with_annotations=True):
    h = build_fixture("exprtree")
    g, mu = abstract_heap(h)
    lengths = container_lengths(h, g, mu) if with_annotations else None
    return g, export_dgml(g, styles, container_lengths=lengths)


def parse(doc: str) -> ET.Element:
    return ET.fromstring(doc)


def links_of(root):
    return root.findall("d:Links/d:Link", NS)


def nodes_of(root):
    return root.findall("d:Nodes/d:Node", NS)


class TestConventions:
    def test_noninjective_link_is_wide_orange(self):
        _, doc = exprtree_dgml()
        root = parse(doc)
        wide = [l for l in links_of(root)
                if l.get("Stroke") == "Orange" and l.get("StrokeThickness") == "3"]
        assert len(wide) == 1
        assert wide[0].get("Source") == "n1" and wide[0].get("Target") == "n7"

    def test_env_node_label_carries_length(self):
        _, doc = exprtree_dgml()
        root = parse(doc)
        labels = {n.get("Id"): n.get("Label") for n in nodes_of(root)}
        assert labels["n9"] == "Var[3]"

    def test_maybe_null_element_edge_is_dashed(self):
        _, doc = exprtree_dgml()
        root = parse(doc)
        dashed = [l for l in links_of(root) if l.get("StrokeDashArray")]
        assert [(l.get("Source"), l.get("Target")) for l in dashed] == [("n9", "n7")]

    def test_null_only_edges_omitted(self):
        h = build_fixture("list", n=3)
        g, _ = abstract_heap(h)
        root = parse(export_dgml(g))
        targets = {l.get("Target") for l in links_of(root)}
        assert f"n{g.null}" not in targets
        assert "n0" not in targets

    def test_root_node_never_drawn_variables_are(self):
        _, doc = exprtree_dgml()
        root = parse(doc)
        ids = {n.get("Id") for n in nodes_of(root)}
        assert "var_exp" in ids and "var_env" in ids
        assert not any(i.startswith("n-1") or i == "n-1" for i in ids)
        var_links = [l for l in links_of(root) if l.get("Source") == "var_exp"]
        assert [l.get("Target") for l in var_links] == ["n1"]

    def test_shading_follows_cardinality(self):
        _, doc = exprtree_dgml()
        root = parse(doc)
        backgrounds = {n.get("Id"): n.get("Background") for n in nodes_of(root)}
        assert backgrounds["n9"] == "White"
        assert backgrounds["n1"] == "Silver"
        assert backgrounds["n7"] == "Silver"

    def test_single_object_graph_white_no_dash(self):
        doc = {"format": "heapsnap-1",
               "types": [{"id": 1, "name": "A", "kind": "object"}],
               "objects": [{"id": 1, "type": 1}], "roots": {"v": 1}}
        g, _ = abstract_heap(parse_snapshot(json.dumps(doc)))
        root = parse(export_dgml(g))
        assert all(n.get("Background") == "White" for n in nodes_of(root))
        assert all(l.get("StrokeDashArray") is None for l in links_of(root))

    def test_self_edge_carries_shape_label(self):
        _, doc = exprtree_dgml()
        root = parse(doc)
        selfs = [l for l in links_of(root)
                 if l.get("Source") == l.get("Target") == "n1"]
        assert len(selfs) == 1
        assert selfs[0].get("Label") == "tree{l, r}"


class TestToggles:
    def test_collapse_off_keeps_multi_edges(self):
        g, _ = exprtree_dgml()
        doc = export_dgml(g, StyleConfig(collapse_multi_edges=False))
        root = parse(doc)
        pairs = [(l.get("Source"), l.get("Target")) for l in links_of(root)]
        assert pairs.count(("n1", "n7")) == 2
        # shape moves onto the node when self-edges are not collapsed
        n1 = next(n for n in nodes_of(root) if n.get("Id") == "n1")
        assert n1.get("ShapeInfo") == "tree{l, r}"

    def test_heat_overrides_background(self):
        h = build_fixture("facegrid", faces=20)
        g, mu = abstract_heap(h)
        metrics = compute_metrics(h, g, mu)
        doc = export_dgml(g, StyleConfig(heat=True), metrics=metrics)
        root = parse(doc)
        point_node = next(nid for nid in g.content_ids()
                          if g.node(nid).types == frozenset({"Point"}))
        el = next(n for n in nodes_of(root) if n.get("Id") == f"n{point_node}")
        assert el.get("Background") == "#FF4500"


class TestReducedExport:
    def test_groups_marked(self):
        g, _ = abstract_heap(build_fixture("octree-scene"))
        r = reduce(g)
        root = parse(export_dgml(r))
        grouped = [n for n in nodes_of(root) if n.get("Group") == "Collapsed"]
        assert len(grouped) == 2  # shape-list and face-structure groups

    def test_well_formed_subset(self):
        for subject in ("exprtree", "octree-scene"):
            g, _ = abstract_heap(build_fixture(subject))
            for doc in (export_dgml(g), export_dgml(reduce(g))):
                root = parse(doc)  # parse failure = not well formed
                assert root.tag == f"{{{DGML_NS}}}DirectedGraph"
                children = {child.tag for child in root}
                allowed = {f"{{{DGML_NS}}}Nodes", f"{{{DGML_NS}}}Links",
                           f"{{{DGML_NS}}}Styles"}
                assert children <= allowed

    def test_unknown_type_rejected(self):
        with pytest.raises(TypeError):
            export_dgml("not a graph")
