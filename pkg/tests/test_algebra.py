"""Compare and merge: order properties, merge soundness, widening behavior."""

from __future__ import annotations

import random

import pytest

from heapgraph import (AbstractEdge, AbstractGraph, AbstractNode,
                       AmbiguousGraphError, ANY, Interval, JOIN, ShapeFact,
                       TREE, WIDEN, abstract_heap, build_fixture,
                       check_embedding, compare, graphs_equal, merge,
                       recursive_relation, zoom)

from helpers import clone_with_offset, family_pair, tame_heap_pair

FIXTURE_GRAPHS = [
    ("exprtree", {}), ("list", {"n": 3}), ("list", {"n": 7}),
    ("dlist", {"n": 5}), ("btree", {"n": 7}), ("facegrid", {"faces": 5}),
    ("octree-scene", {}),
]


def graph_of(name, params):
    h = build_fixture(name, **params)
    g, mu = abstract_heap(h)
    return h, g, mu


class TestCompare:
    def test_reflexive_on_all_fixtures(self):
        for name, params in FIXTURE_GRAPHS:
            _, g, _ = graph_of(name, params)
            result = compare(g, g)
            assert result.leq
            assert all(result.phi.nodes[n] == n for n in result.phi.nodes)

    def test_wider_cardinality_is_leq(self):
        _, g, _ = graph_of("exprtree", {})
        wide = AbstractGraph(
            [AbstractNode(n.id, n.types, Interval(1, 10) if n.id == 1 else n.card,
                          n.is_root, n.is_null) for n in g.nodes.values()],
            g.edges, g.shapes, g.root, g.null)
        assert compare(g, wide).leq
        assert not compare(wide, g).leq

    def test_shape_contravariance(self):
        # g2 requiring a tree over fewer labels passes; over more labels fails.
        h = build_fixture("exprtree")
        g, _ = abstract_heap(h)
        smaller = AbstractGraph(
            g.nodes.values(), g.edges,
            [s if s.node != 1 else ShapeFact(1, frozenset({"l"}), TREE)
             for s in g.shapes], g.root, g.null)
        assert compare(g, smaller).leq
        result = compare(smaller, g)
        assert not result.leq
        assert any(d.kind == "shape-weakening" for d in result.diffs)

    def test_dropped_edge_diff(self):
        _, g, _ = graph_of("exprtree", {})
        pruned = AbstractGraph(g.nodes.values(),
                               [e for e in g.edges if e.key() != (1, "r", 3)],
                               g.shapes, g.root, g.null)
        result = compare(g, pruned)
        assert not result.leq
        assert any(d.kind == "unmatched-edge" for d in result.diffs)

    def test_narrowed_interval_diff(self):
        _, g, _ = graph_of("exprtree", {})
        narrowed = AbstractGraph(
            [AbstractNode(n.id, n.types, Interval(1, 1) if n.id == 1 else n.card,
                          n.is_root, n.is_null) for n in g.nodes.values()],
            g.edges, g.shapes, g.root, g.null)
        result = compare(g, narrowed)
        assert not result.leq
        assert any(d.kind == "cardinality-excess" for d in result.diffs)

    def test_injectivity_weakening_diff(self):
        _, g, _ = graph_of("exprtree", {})
        stronger = AbstractGraph(
            g.nodes.values(),
            [AbstractEdge(e.src, e.label, e.tgt, True) if e.key() == (1, "l", 7)
             else e for e in g.edges],
            g.shapes, g.root, g.null)
        result = compare(g, stronger)
        assert not result.leq
        assert any(d.kind == "injectivity-weakening" for d in result.diffs)

    def test_added_tree_fact_diff(self):
        h = build_fixture("dlist", n=5)
        g, _ = abstract_heap(h)
        nid = g.content_ids()[0]
        stronger = AbstractGraph(
            g.nodes.values(), g.edges,
            list(g.shapes) + [ShapeFact(nid, frozenset({"next", "prev"}), TREE)],
            g.root, g.null)
        result = compare(g, stronger)
        assert not result.leq
        assert any(d.kind == "shape-weakening" for d in result.diffs)

    def test_ambiguous_input_raises(self):
        _, g, _ = graph_of("exprtree", {})
        hz, gz, _ = graph_of("exprtree", {})
        gzoom, _ = zoom(build_fixture("exprtree"), {7})
        with pytest.raises(AmbiguousGraphError):
            compare(gzoom, gzoom)

    def test_diffs_are_deterministic_and_capped(self):
        _, g, _ = graph_of("exprtree", {})
        pruned = AbstractGraph(g.nodes.values(),
                               [e for e in g.edges if e.src == g.root],
                               [s for s in g.shapes if not s.labels],
                               g.root, g.null)
        d1 = compare(g, pruned)
        d2 = compare(g, pruned)
        assert d1.diffs == d2.diffs
        assert len(d1.diffs) <= 100


class TestMerge:
    def test_idempotent_on_fixtures(self):
        for name, params in FIXTURE_GRAPHS:
            h, g, _ = graph_of(name, params)
            rel = recursive_relation(h.type_table)
            merged = merge(g, g, JOIN, rel).graph
            assert graphs_equal(merged, g), name

    def test_list_sizes_hull(self):
        _, g2, _ = graph_of("list", {"n": 2})
        _, g5, _ = graph_of("list", {"n": 5})
        merged = merge(g2, g5, JOIN).graph
        summary = [n for n in merged.nodes.values()
                   if n.id not in (merged.root, merged.null)]
        assert len(summary) == 1
        assert summary[0].card == Interval(2, 5)
        assert any(s.shape == TREE and s.labels == frozenset({"next"})
                   for s in merged.shape_facts(summary[0].id))

    def test_same_graph_edges_collapsing_on_one_target_lose_injectivity(self):
        # Two sources with injective same-label edges onto one target merge
        # into an edge that can no longer promise distinct targets.
        nodes = [AbstractNode(-1, frozenset(), Interval.exact(1), is_root=True),
                 AbstractNode(0, frozenset(), Interval.exact(1), is_null=True),
                 AbstractNode(1, frozenset({"A"}), Interval.exact(1)),
                 AbstractNode(2, frozenset({"A"}), Interval.exact(1)),
                 AbstractNode(3, frozenset({"B"}), Interval.exact(1))]
        edges = [AbstractEdge(-1, "x", 1, True), AbstractEdge(-1, "y", 2, True),
                 AbstractEdge(1, "f", 3, True), AbstractEdge(2, "f", 3, True)]
        shapes = [ShapeFact(n, frozenset(), TREE) for n in (1, 2, 3)]
        g1 = AbstractGraph(nodes, edges, shapes, -1, 0)
        # Second graph: x and y name the same region, forcing 1 and 2 together.
        g2 = AbstractGraph(
            [nodes[0], nodes[1],
             AbstractNode(1, frozenset({"A"}), Interval.exact(2)),
             AbstractNode(3, frozenset({"B"}), Interval.exact(1))],
            [AbstractEdge(-1, "x", 1, True), AbstractEdge(-1, "y", 1, True),
             AbstractEdge(1, "f", 3, True)],
            [ShapeFact(1, frozenset(), TREE), ShapeFact(3, frozenset(), TREE)],
            -1, 0)
        merged = merge(g1, g2, JOIN).graph
        f_edges = [e for e in merged.edges if e.label == "f"]
        assert len(f_edges) == 1
        assert f_edges[0].injective is False

    def test_widen_example(self):
        g1 = _single_node_graph(Interval(2, 2))
        g2 = _single_node_graph(Interval(5, 5))
        widened = merge(g1, g2, WIDEN).graph
        node = [n for n in widened.nodes.values()
                if n.id not in (widened.root, widened.null)][0]
        assert node.card == Interval(2, None)

    def test_widen_keeps_stable_bound(self):
        g1 = _single_node_graph(Interval(2, 5))
        g2 = _single_node_graph(Interval(3, 3))
        widened = merge(g1, g2, WIDEN).graph
        node = [n for n in widened.nodes.values()
                if n.id not in (widened.root, widened.null)][0]
        assert node.card == Interval(2, 5)

    def test_unknown_mode(self):
        _, g, _ = graph_of("list", {"n": 2})
        with pytest.raises(ValueError, match="mode"):
            merge(g, g, "meet")

    def test_disjoint_roots_stay_separate(self):
        _, ga, _ = graph_of("list", {"n": 3})
        _, gb, _ = graph_of("btree", {"n": 3})
        merged = merge(ga, gb, JOIN)
        assert compare(ga, merged.graph).leq
        assert compare(gb, merged.graph).leq

    def test_widening_chain_reaches_fixpoint(self):
        sizes = (2, 3, 5, 8, 13, 21, 34)
        graphs = [abstract_heap(build_fixture("list", n=n))[0] for n in sizes]
        acc = graphs[0]
        stable_at = None
        for step, nxt in enumerate(graphs[1:], start=1):
            new = merge(acc, nxt, WIDEN).graph
            if graphs_equal(new, acc):
                stable_at = step
                break
            acc = new
        # type-set count + 2 = 3 steps for the single-typed list family
        assert stable_at is not None and stable_at <= 3


def _single_node_graph(card: Interval) -> AbstractGraph:
    nodes = [AbstractNode(-1, frozenset(), Interval.exact(1), is_root=True),
             AbstractNode(0, frozenset(), Interval.exact(1), is_null=True),
             AbstractNode(1, frozenset({"T"}), card)]
    edges = [AbstractEdge(-1, "v", 1, True)]
    return AbstractGraph(nodes, edges, [ShapeFact(1, frozenset(), TREE)], -1, 0)


class TestMergeSoundness:
    def test_witnesses_transfer_through_eta(self):
        rng = random.Random(4242)
        for _ in range(120):
            h1, h2 = tame_heap_pair(rng)
            g1, mu1 = abstract_heap(h1)
            g2, mu2 = abstract_heap(h2)
            for mode in (JOIN, WIDEN):
                result = merge(g1, g2, mode)
                r1 = check_embedding(h1, result.graph, mu1.compose(result.eta1_nodes))
                r2 = check_embedding(h2, result.graph, mu2.compose(result.eta2_nodes))
                assert r1.ok, (mode, r1.failures)
                assert r2.ok, (mode, r2.failures)

    def test_upper_bound_on_family_pairs(self):
        rng = random.Random(777)
        for _ in range(100):
            h1, h2 = family_pair(rng)
            g1, _ = abstract_heap(h1)
            g2, _ = abstract_heap(h2)
            rel = recursive_relation(h1.type_table)
            result = merge(g1, g2, JOIN, rel)
            c1, c2 = compare(g1, result.graph), compare(g2, result.graph)
            assert c1.leq, c1.diffs
            assert c2.leq, c2.diffs

    def test_upper_bound_on_clone_pairs(self):
        rng = random.Random(778)
        for _ in range(60):
            h1, _ = tame_heap_pair(rng)
            h2 = clone_with_offset(h1)
            g1, _ = abstract_heap(h1)
            g2, _ = abstract_heap(h2)
            result = merge(g1, g2, JOIN)
            assert compare(g1, result.graph).leq
            assert compare(g2, result.graph).leq

    def test_upper_bound_on_fixture_pairs(self):
        for name1, p1 in FIXTURE_GRAPHS:
            for name2, p2 in FIXTURE_GRAPHS:
                _, g1, _ = graph_of(name1, p1)
                _, g2, _ = graph_of(name2, p2)
                result = merge(g1, g2, JOIN)
                assert compare(g1, result.graph).leq, (name1, name2)
                assert compare(g2, result.graph).leq, (name1, name2)

    def test_compare_soundness_on_samples(self):
        # When compare grants LEQ, fixture heaps passing g1 pass g2 through phi.
        for name, params in FIXTURE_GRAPHS:
            h, g1, mu = graph_of(name, params)
            g2 = AbstractGraph(
                [AbstractNode(n.id, n.types,
                              Interval(0, None) if not (n.is_root or n.is_null)
                              else n.card, n.is_root, n.is_null)
                 for n in g1.nodes.values()],
                [AbstractEdge(e.src, e.label, e.tgt, False) for e in g1.edges],
                [s for s in g1.shapes if s.shape == ANY], g1.root, g1.null)
            result = compare(g1, g2)
            assert result.leq
            full_phi = {n: n for n in g1.nodes}
            full_phi.update(result.phi.nodes)
            assert check_embedding(h, g2, mu.compose(full_phi)).ok
