"""Interval algebra, the embedding checker, canonical form, and ahg-1 I/O."""

from __future__ import annotations

import itertools
import json
import random

import pytest

from heapgraph import (AbstractEdge, AbstractGraph, AbstractNode, ANY,
                       EmbeddingDomainError, EmbeddingMap, Interval,
                       SchemaError, ShapeFact, TREE, abstract_heap,
                       build_fixture, canonicalize, check_embedding, compare,
                       deserialize, dump_snapshot, graphs_equal,
                       parse_snapshot, serialize)

BOUNDS = [Interval(lo, hi) for lo in range(9) for hi in range(lo, 9)] + \
         [Interval(lo, None) for lo in range(9)]


class TestInterval:
    def test_validation(self):
        with pytest.raises(ValueError):
            Interval(3, 2)
        with pytest.raises(ValueError):
            Interval(-1, 2)

    def test_membership(self):
        assert 4 in Interval(4, 4)
        assert 5 not in Interval(4, 4)
        assert 10 ** 9 in Interval(2, None)

    def test_sum_commutative_associative(self):
        for a, b in itertools.product(BOUNDS, BOUNDS):
            assert a.plus(b) == b.plus(a)
        for a, b, c in itertools.islice(
                itertools.product(BOUNDS, BOUNDS, BOUNDS), 0, None, 97):
            assert a.plus(b).plus(c) == a.plus(b.plus(c))

    def test_hull_commutative_associative(self):
        for a, b in itertools.product(BOUNDS, BOUNDS):
            assert a.hull(b) == b.hull(a)
        for a, b, c in itertools.islice(
                itertools.product(BOUNDS, BOUNDS, BOUNDS), 0, None, 97):
            assert a.hull(b).hull(c) == a.hull(b.hull(c))

    def test_hull_is_least_upper_bound(self):
        for a, b in itertools.product(BOUNDS, BOUNDS):
            h = a.hull(b)
            assert a.issubset(h) and b.issubset(h)
            for c in BOUNDS:
                if a.issubset(c) and b.issubset(c):
                    assert h.issubset(c)

    def test_containment_matches_bounds(self):
        for a, b in itertools.product(BOUNDS, BOUNDS):
            expected = b.lo <= a.lo and (b.hi is None or
                                         (a.hi is not None and a.hi <= b.hi))
            assert a.issubset(b) == expected

    def test_infinity_absorbs_in_sum(self):
        assert Interval(1, None).plus(Interval(2, 5)) == Interval(3, None)


def exprtree_triple():
    h = build_fixture("exprtree")
    g, mu = abstract_heap(h)
    return h, g, mu


def rebuild(g, nodes=None, edges=None, shapes=None):
    return AbstractGraph(nodes if nodes is not None else g.nodes.values(),
                         edges if edges is not None else g.edges,
                         shapes if shapes is not None else g.shapes,
                         g.root, g.null)


class TestCheckEmbedding:
    def test_passes_by_construction(self):
        h, g, mu = exprtree_triple()
        assert check_embedding(h, g, mu).ok

    def test_counting_failure_names_node(self):
        h, g, mu = exprtree_triple()
        nodes = [AbstractNode(n.id, n.types, Interval(5, 5)) if n.id == 1 else n
                 for n in g.nodes.values()]
        report = check_embedding(h, rebuild(g, nodes=nodes), mu)
        assert not report.ok
        fails = report.by_predicate("counting")
        assert len(fails) == 1 and "node 1" in fails[0].message

    def test_embed_failure_names_pointer(self):
        h, g, mu = exprtree_triple()
        edges = [e for e in g.edges if e.key() != (1, "r", 3)]
        report = check_embedding(h, rebuild(g, edges=edges), mu)
        fails = report.by_predicate("embed")
        assert any("2-r->3" in v.message for v in fails)

    def test_typing_failure(self):
        h, g, mu = exprtree_triple()
        nodes = [AbstractNode(n.id, n.types - {"Sub"}, n.card) if n.id == 1 else n
                 for n in g.nodes.values()]
        report = check_embedding(h, rebuild(g, nodes=nodes), mu)
        assert report.by_predicate("typing")

    def test_injective_failure(self):
        h, g, mu = exprtree_triple()
        edges = [AbstractEdge(e.src, e.label, e.tgt, True)
                 if e.key() == (1, "l", 7) else e for e in g.edges]
        report = check_embedding(h, rebuild(g, edges=edges), mu)
        assert report.by_predicate("injective")

    def test_shape_failure(self):
        h = build_fixture("dlist", n=6)
        g, mu = abstract_heap(h)
        nid = g.content_ids()[0]
        shapes = [s for s in g.shapes if s.node != nid]
        shapes.append(ShapeFact(nid, frozenset({"next", "prev"}), TREE))
        report = check_embedding(h, rebuild(g, shapes=shapes), mu)
        assert report.by_predicate("shape")

    def test_partial_witness_is_domain_error(self):
        h, g, mu = exprtree_triple()
        partial = EmbeddingMap({k: v for k, v in mu.to_node.items() if k != 5})
        with pytest.raises(EmbeddingDomainError):
            check_embedding(h, g, partial)

    def test_rewired_witness_fails(self):
        h, g, mu = exprtree_triple()
        moved = dict(mu.to_node)
        moved[3] = 7  # a Const claimed to live in the Var node
        report = check_embedding(h, g, EmbeddingMap(moved))
        assert not report.ok

    def test_monotone_along_compare(self, heap_corpus):
        # Whenever compare says g1 fits under g2, passing witnesses transfer.
        checked = 0
        for h in heap_corpus:
            if checked >= 30:
                break
            g1, mu = abstract_heap(h)
            g2 = rebuild(
                g1,
                nodes=[AbstractNode(n.id, n.types, Interval(0, None),
                                    n.is_root, n.is_null)
                       for n in g1.nodes.values()],
                edges=[AbstractEdge(e.src, e.label, e.tgt, False)
                       for e in g1.edges],
                shapes=[s for s in g1.shapes if s.shape == ANY])
            result = compare(g1, g2)
            assert result.leq
            checked += 1
            # phi covers reachable nodes; unreachable ones keep their ids here
            full_phi = {n: n for n in g1.nodes}
            full_phi.update(result.phi.nodes)
            composed = mu.compose(full_phi)
            assert check_embedding(h, g2, composed).ok


class TestCanonicalize:
    def test_idempotent(self):
        _, g, _ = exprtree_triple()
        c1 = canonicalize(g)
        assert serialize(canonicalize(c1)) == serialize(c1)

    def test_permutation_invariance(self):
        h = build_fixture("exprtree")
        doc = json.loads(dump_snapshot(h))
        rng = random.Random(17)
        baseline = serialize(canonicalize(abstract_heap(h)[0]))
        for _ in range(100):
            rng.shuffle(doc["objects"])
            g, _ = abstract_heap(parse_snapshot(json.dumps(doc)))
            assert serialize(canonicalize(g)) == baseline

    def test_traversal_order(self):
        # Variable roots in name order: env before exp, then successors.
        _, g, _ = exprtree_triple()
        order = {}
        c = canonicalize(g)
        for nid in c.content_ids():
            order[tuple(sorted(c.node(nid).types))] = nid
        assert order[("Var[]",)] == 2      # env target first
        assert order[("Add", "Mult", "Sub")] == 3  # exp target next
        assert order[("Var",)] == 4        # reached from the env array
        assert order[("Const",)] == 5

    def test_unreachable_nodes_get_stable_ids(self):
        doc = {"format": "heapsnap-1",
               "types": [{"id": 1, "name": "A", "kind": "object",
                          "fields": [{"name": "f", "type": 1}]}],
               "objects": [{"id": 1, "type": 1, "fields": {"f": 0}},
                           {"id": 2, "type": 1, "fields": {"f": 3}},
                           {"id": 3, "type": 1}],
               "roots": {"a": 1}}
        h = parse_snapshot(json.dumps(doc))
        g, _ = abstract_heap(h)
        assert serialize(canonicalize(g)) == serialize(canonicalize(canonicalize(g)))


class TestSerialization:
    def test_round_trip_identity(self):
        for name in ("exprtree", "dlist", "octree-scene"):
            g = canonicalize(abstract_heap(build_fixture(name))[0])
            assert serialize(deserialize(serialize(g))) == serialize(g)

    def test_byte_identical_for_equal_graphs(self):
        g1 = canonicalize(abstract_heap(build_fixture("list", n=4))[0])
        g2 = canonicalize(abstract_heap(build_fixture("list", n=4))[0])
        assert serialize(g1) == serialize(g2)
        assert graphs_equal(g1, g2)

    def test_missing_cardinality_is_schema_error(self):
        g = canonicalize(abstract_heap(build_fixture("list", n=2))[0])
        doc = json.loads(serialize(g))
        del doc["nodes"][2]["card"]
        with pytest.raises(SchemaError) as err:
            deserialize(json.dumps(doc))
        assert "card" in str(err.value)
        assert "nodes[2]" in err.value.location

    def test_unknown_key_rejected(self):
        g = canonicalize(abstract_heap(build_fixture("list", n=2))[0])
        doc = json.loads(serialize(g))
        doc["extra"] = True
        with pytest.raises(SchemaError, match="unknown top-level key"):
            deserialize(json.dumps(doc))

    def test_infinite_bound_round_trip(self):
        doc = json.loads(serialize(canonicalize(abstract_heap(
            build_fixture("list", n=3))[0])))
        doc["nodes"][2]["card"] = [2, "inf"]
        g = deserialize(json.dumps(doc))
        nid = [n for n in g.nodes if n not in (g.root, g.null)][0]
        assert g.node(nid).card == Interval(2, None)
        assert json.loads(serialize(g))["nodes"][2]["card"] == [2, "inf"]

    def test_dangling_edge_is_schema_error(self):
        g = canonicalize(abstract_heap(build_fixture("list", n=2))[0])
        doc = json.loads(serialize(g))
        doc["edges"].append({"src": 2, "label": "z", "tgt": 99, "inj": True})
        with pytest.raises(SchemaError, match="unknown node"):
            deserialize(json.dumps(doc))


MUTATION_FIXTURES = ("exprtree", "dlist", "btree", "facegrid")


class TestMutationKillsChecker:
    """Every single-field weakening of a passing triple must be rejected."""

    @pytest.mark.parametrize("name", MUTATION_FIXTURES)
    def test_drop_each_edge(self, name):
        h = build_fixture(name) if name != "facegrid" else build_fixture(name, faces=4)
        g, mu = abstract_heap(h)
        for dropped in g.edges:
            edges = [e for e in g.edges if e is not dropped]
            self_labels = {}
            for e in edges:
                if e.src == e.tgt:
                    self_labels.setdefault(e.src, set()).add(e.label)
            shapes = [s for s in g.shapes
                      if s.labels <= self_labels.get(s.node, set())]
            mutant = rebuild(g, edges=edges, shapes=shapes)
            assert not check_embedding(h, mutant, mu).ok

    @pytest.mark.parametrize("name", MUTATION_FIXTURES)
    def test_shrink_each_cardinality(self, name):
        h = build_fixture(name) if name != "facegrid" else build_fixture(name, faces=4)
        g, mu = abstract_heap(h)
        for nid in g.content_ids():
            count = g.node(nid).card.lo
            nodes = [AbstractNode(n.id, n.types, Interval(count + 1, count + 1))
                     if n.id == nid else n for n in g.nodes.values()]
            assert not check_embedding(h, rebuild(g, nodes=nodes), mu).ok

    @pytest.mark.parametrize("name", MUTATION_FIXTURES)
    def test_remove_each_type(self, name):
        h = build_fixture(name) if name != "facegrid" else build_fixture(name, faces=4)
        g, mu = abstract_heap(h)
        for nid in g.content_ids():
            for tname in g.node(nid).types:
                nodes = [AbstractNode(n.id, n.types - {tname}, n.card)
                         if n.id == nid else n for n in g.nodes.values()]
                assert not check_embedding(h, rebuild(g, nodes=nodes), mu).ok

    @pytest.mark.parametrize("name", MUTATION_FIXTURES)
    def test_force_each_noninjective_edge(self, name):
        h = build_fixture(name) if name != "facegrid" else build_fixture(name, faces=4)
        g, mu = abstract_heap(h)
        for target in [e for e in g.edges if not e.injective]:
            edges = [AbstractEdge(e.src, e.label, e.tgt, True)
                     if e is target else e for e in g.edges]
            assert not check_embedding(h, rebuild(g, edges=edges), mu).ok

    @pytest.mark.parametrize("name", MUTATION_FIXTURES)
    def test_promote_each_any_fact(self, name):
        h = build_fixture(name) if name != "facegrid" else build_fixture(name, faces=4)
        g, mu = abstract_heap(h)
        for fact in [s for s in g.shapes if s.shape == ANY]:
            shapes = [ShapeFact(s.node, s.labels, TREE) if s is fact else s
                      for s in g.shapes]
            assert not check_embedding(h, rebuild(g, shapes=shapes), mu).ok
