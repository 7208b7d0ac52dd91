"""Abstract heap graphs and the machinery that relates them to concrete heaps.

An abstract graph summarizes regions of a concrete heap: nodes carry type
sets and cardinality intervals, edges carry an injectivity bit, and shape
facts describe the internal layout of a summarized region.  check_embedding
is the executable membership test: given a witness map from concrete objects
to abstract nodes it verifies, with the brute-force oracles, that the heap is
one of the graph's instances.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from .heap_model import (ANY, NULL_ID, ROOT_ID, TREE, ConcreteHeap, Label,
                         oracle_shape, pointers_between)

# Abstract edge label standing for every array/container element index.
ELEMENT_LABEL = "[]"

AHG_FORMAT = "ahg-1"


class SchemaError(ValueError):
    """Invalid ahg-1 document, with a JSON-path-ish location."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location
        self.message = message


@dataclass(frozen=True, order=True)
class Interval:
    """Closed natural-number interval; hi=None means unbounded above."""

    lo: int
    hi: int | None

    def __post_init__(self):
        if self.lo < 0:
            raise ValueError(f"interval lower bound must be >= 0, got {self.lo}")
        if self.hi is not None and self.hi < self.lo:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, n: int) -> Interval:
        return cls(n, n)

    def __contains__(self, n: int) -> bool:
        return n >= self.lo and (self.hi is None or n <= self.hi)

    def issubset(self, other: Interval) -> bool:
        upper_ok = other.hi is None or (self.hi is not None and self.hi <= other.hi)
        return self.lo >= other.lo and upper_ok

    def plus(self, other: Interval) -> Interval:
        hi = None if self.hi is None or other.hi is None else self.hi + other.hi
        return Interval(self.lo + other.lo, hi)

    def hull(self, other: Interval) -> Interval:
        hi = None if self.hi is None or other.hi is None else max(self.hi, other.hi)
        return Interval(min(self.lo, other.lo), hi)

    def to_json(self) -> list:
        return [self.lo, "inf" if self.hi is None else self.hi]

    def __str__(self) -> str:
        return f"[{self.lo},inf)" if self.hi is None else f"[{self.lo},{self.hi}]"


ZERO = Interval(0, 0)


@dataclass(frozen=True)
class AbstractNode:
    id: int
    types: frozenset[str]
    card: Interval
    is_root: bool = False
    is_null: bool = False


@dataclass(frozen=True)
class AbstractEdge:
    src: int
    label: str
    tgt: int
    injective: bool

    def key(self) -> tuple[int, str, int]:
        return (self.src, self.label, self.tgt)


@dataclass(frozen=True)
class ShapeFact:
    node: int
    labels: frozenset[str]
    shape: str  # TREE or ANY

    def sort_key(self):
        return (self.node, sorted(self.labels), self.shape)


def concretizes(abstract_label: str, concrete_label: Label) -> bool:
    """Does this abstract edge label cover the concrete pointer label?"""
    if abstract_label == ELEMENT_LABEL:
        return isinstance(concrete_label, int)
    return abstract_label == concrete_label


def abstract_label_of(concrete_label: Label) -> str:
    return ELEMENT_LABEL if isinstance(concrete_label, int) else concrete_label


class AbstractGraph:
    """Immutable abstract heap graph with a distinguished root and null node."""

    def __init__(self, nodes: Iterable[AbstractNode], edges: Iterable[AbstractEdge],
                 shapes: Iterable[ShapeFact], root: int, null: int):
        self.nodes: dict[int, AbstractNode] = {}
        for n in nodes:
            if n.id in self.nodes:
                raise ValueError(f"duplicate node id {n.id}")
            self.nodes[n.id] = n
        if root not in self.nodes or not self.nodes[root].is_root:
            raise ValueError("root id must name a node marked is_root")
        if null not in self.nodes or not self.nodes[null].is_null:
            raise ValueError("null id must name a node marked is_null")
        self.root = root
        self.null = null
        seen: set[tuple[int, str, int]] = set()
        edge_list = []
        for e in edges:
            if e.src not in self.nodes or e.tgt not in self.nodes:
                raise ValueError(f"edge {e.key()} references unknown node")
            if e.tgt == root:
                raise ValueError("the root node can never be an edge target")
            if e.key() in seen:
                raise ValueError(f"duplicate edge {e.key()}")
            seen.add(e.key())
            edge_list.append(e)
        self.edges: tuple[AbstractEdge, ...] = tuple(
            sorted(edge_list, key=lambda e: (e.src, e.label, e.tgt)))
        shape_list = []
        for s in shapes:
            if s.node not in self.nodes:
                raise ValueError(f"shape fact references unknown node {s.node}")
            if s.shape not in (TREE, ANY):
                raise ValueError(f"unknown shape {s.shape!r}")
            if not s.labels <= self.self_labels(s.node):
                raise ValueError(
                    f"shape fact labels {sorted(s.labels)} exceed self-edge labels "
                    f"of node {s.node}")
            shape_list.append(s)
        self.shapes: tuple[ShapeFact, ...] = tuple(
            sorted(shape_list, key=lambda s: s.sort_key()))

    @cached_property
    def _edge_keys(self) -> frozenset[tuple[int, str, int]]:
        return frozenset(e.key() for e in self.edges)

    @cached_property
    def _out(self) -> dict[int, tuple[AbstractEdge, ...]]:
        out: dict[int, list[AbstractEdge]] = {n: [] for n in self.nodes}
        for e in self.edges:
            out[e.src].append(e)
        return {n: tuple(es) for n, es in out.items()}

    @cached_property
    def _in(self) -> dict[int, tuple[AbstractEdge, ...]]:
        out: dict[int, list[AbstractEdge]] = {n: [] for n in self.nodes}
        for e in self.edges:
            out[e.tgt].append(e)
        return {n: tuple(es) for n, es in out.items()}

    def node(self, node_id: int) -> AbstractNode:
        return self.nodes[node_id]

    def has_edge(self, src: int, label: str, tgt: int) -> bool:
        return (src, label, tgt) in self._edge_keys

    def out_edges(self, node_id: int) -> tuple[AbstractEdge, ...]:
        return self._out[node_id]

    def in_edges(self, node_id: int) -> tuple[AbstractEdge, ...]:
        return self._in[node_id]

    def content_ids(self) -> tuple[int, ...]:
        return tuple(n for n in sorted(self.nodes) if n not in (self.root, self.null))

    def self_labels(self, node_id: int) -> frozenset[str]:
        return frozenset(e.label for e in self.edges
                         if e.src == node_id and e.tgt == node_id)

    def shape_facts(self, node_id: int) -> tuple[ShapeFact, ...]:
        return tuple(s for s in self.shapes if s.node == node_id)

    def var_edges(self) -> tuple[AbstractEdge, ...]:
        return self._out[self.root]

    def __repr__(self) -> str:
        return (f"AbstractGraph({len(self.nodes)} nodes, {len(self.edges)} edges, "
                f"{len(self.shapes)} shape facts)")


# --- embedding (concretization membership) checks ---------------------------


@dataclass(frozen=True)
class EmbeddingMap:
    """Witness map from concrete object ids to abstract node ids.

    root and null always map to the graph's root and null nodes; only heap
    objects appear in to_node.
    """

    to_node: dict[int, int]

    def node_of(self, object_id: int, g: AbstractGraph) -> int:
        if object_id == NULL_ID:
            return g.null
        if object_id == ROOT_ID:
            return g.root
        return self.to_node[object_id]

    def inverse(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for oid, nid in self.to_node.items():
            out.setdefault(nid, []).append(oid)
        return {n: sorted(members) for n, members in out.items()}

    def compose(self, node_map: dict[int, int]) -> EmbeddingMap:
        """Chain through a node renaming/merging map (e.g. canonical ids or eta)."""
        return EmbeddingMap({oid: node_map[nid] for oid, nid in self.to_node.items()})


class EmbeddingDomainError(ValueError):
    """The witness map is unusable (not total, or maps outside the graph)."""


@dataclass(frozen=True)
class Violation:
    predicate: str  # embed | typing | counting | injective | shape
    message: str


@dataclass(frozen=True)
class EmbeddingReport:
    ok: bool
    failures: tuple[Violation, ...]

    def by_predicate(self, predicate: str) -> tuple[Violation, ...]:
        return tuple(v for v in self.failures if v.predicate == predicate)


def check_embedding(h: ConcreteHeap, g: AbstractGraph, mu: EmbeddingMap) -> EmbeddingReport:
    """Test literal membership of the heap in the graph's concretization.

    All five conditions are evaluated with the concrete oracles; every
    violation is reported with its witnessing pointer or node.
    """
    for oid in h.objects:
        if oid not in mu.to_node:
            raise EmbeddingDomainError(f"witness map is not total: object {oid} unmapped")
        if mu.to_node[oid] not in g.nodes:
            raise EmbeddingDomainError(
                f"witness maps object {oid} to unknown node {mu.to_node[oid]}")
        nid = mu.to_node[oid]
        if nid in (g.root, g.null):
            raise EmbeddingDomainError(
                f"witness maps heap object {oid} to the root/null node")

    failures: list[Violation] = []

    # Embed: every concrete pointer is covered by an abstract edge.
    for src, label, tgt in h.pointers:
        a, b = mu.node_of(src, g), mu.node_of(tgt, g)
        if not g.has_edge(a, abstract_label_of(label), b):
            failures.append(Violation(
                "embed", f"pointer {src}-{label}->{tgt} has no covering edge "
                         f"({a},{abstract_label_of(label)},{b})"))

    # Typing: member types are inside the node's type set.
    for oid in h.objects:
        tname = h.type_name(oid)
        node = g.node(mu.to_node[oid])
        if tname not in node.types:
            failures.append(Violation(
                "typing", f"object {oid} has type {tname!r} outside node "
                          f"{node.id} types {sorted(node.types)}"))

    # Counting: member counts fall in the cardinality intervals.
    counts: dict[int, int] = {nid: 0 for nid in g.nodes}
    for nid in mu.to_node.values():
        counts[nid] += 1
    counts[g.root] += 1
    counts[g.null] += 1
    for nid, node in g.nodes.items():
        if counts[nid] not in node.card:
            failures.append(Violation(
                "counting", f"node {nid} holds {counts[nid]} objects, "
                            f"outside {node.card}"))

    inverse = mu.inverse()

    # Injective: claimed-injective edges are injective for every concrete label.
    for e in g.edges:
        if not e.injective:
            continue
        src_region = inverse.get(e.src, [])
        tgt_region = [NULL_ID] if e.tgt == g.null else inverse.get(e.tgt, [])
        by_label: dict[Label, list[tuple[int, int]]] = {}
        for s, label, t in pointers_between(h, src_region, set(tgt_region) | set()):
            if concretizes(e.label, label):
                by_label.setdefault(label, []).append((s, t))
        for label, ptrs in by_label.items():
            tgts = [t for _, t in ptrs]
            if len(set(tgts)) != len(tgts):
                failures.append(Violation(
                    "injective", f"edge {e.key()} claims injectivity but label "
                                 f"{label!r} shares a target"))
                break

    # Shape: tree facts hold for the concrete subregions.
    for fact in g.shapes:
        if fact.shape != TREE:
            continue
        region = inverse.get(fact.node, [])
        concrete_labels: set[Label] = set()
        for s, label, t in pointers_between(h, region, region):
            if any(concretizes(al, label) for al in fact.labels):
                concrete_labels.add(label)
        if oracle_shape(h, region, concrete_labels) != TREE:
            failures.append(Violation(
                "shape", f"node {fact.node} claims tree over "
                         f"{sorted(fact.labels)} but region is not a forest"))

    return EmbeddingReport(not failures, tuple(failures))


# --- canonical form ----------------------------------------------------------

CANONICAL_ROOT = 0
CANONICAL_NULL = 1


def canonical_order(g: AbstractGraph) -> dict[int, int]:
    """Deterministic renumbering: root, null, then a breadth-first traversal
    seeded by variable roots in name order; ties broken by edge label and the
    minimum type name of the target."""
    order: dict[int, int] = {g.root: CANONICAL_ROOT, g.null: CANONICAL_NULL}
    queue: list[int] = []

    def edge_key(e: AbstractEdge):
        types = g.node(e.tgt).types
        return (e.label, min(types) if types else "")

    for e in sorted(g.var_edges(), key=lambda e: e.label):
        if e.tgt not in order:
            order[e.tgt] = len(order)
            queue.append(e.tgt)
    i = 0
    while i < len(queue):
        nid = queue[i]
        i += 1
        for e in sorted(g.out_edges(nid), key=edge_key):
            if e.tgt not in order:
                order[e.tgt] = len(order)
                queue.append(e.tgt)
    # Unreachable nodes: deterministic structural key, then BFS from each.
    remaining = [n for n in g.nodes if n not in order]
    remaining.sort(key=lambda n: (sorted(g.node(n).types), g.node(n).card.lo,
                                  g.node(n).card.hi is None, g.node(n).card.hi or 0,
                                  len(g.out_edges(n))))
    for start in remaining:
        if start in order:
            continue
        order[start] = len(order)
        queue = [start]
        i = 0
        while i < len(queue):
            nid = queue[i]
            i += 1
            for e in sorted(g.out_edges(nid), key=edge_key):
                if e.tgt not in order:
                    order[e.tgt] = len(order)
                    queue.append(e.tgt)
    return order


def relabel(g: AbstractGraph, mapping: dict[int, int]) -> AbstractGraph:
    nodes = [AbstractNode(mapping[n.id], n.types, n.card, n.is_root, n.is_null)
             for n in g.nodes.values()]
    edges = [AbstractEdge(mapping[e.src], e.label, mapping[e.tgt], e.injective)
             for e in g.edges]
    shapes = [ShapeFact(mapping[s.node], s.labels, s.shape) for s in g.shapes]
    return AbstractGraph(nodes, edges, shapes, mapping[g.root], mapping[g.null])


def canonicalize(g: AbstractGraph) -> AbstractGraph:
    """Renumber node ids deterministically; isomorphic to the input, idempotent."""
    return relabel(g, canonical_order(g))


def graphs_equal(g1: AbstractGraph, g2: AbstractGraph) -> bool:
    """Equality is byte equality of canonical serializations."""
    return serialize(canonicalize(g1)) == serialize(canonicalize(g2))


# --- ahg-1 serialization -----------------------------------------------------


def graph_document(g: AbstractGraph) -> dict:
    return {
        "format": AHG_FORMAT,
        "nodes": [{"id": n.id, "types": sorted(n.types), "card": n.card.to_json()}
                  for n in sorted(g.nodes.values(), key=lambda n: n.id)],
        "edges": [{"src": e.src, "label": e.label, "tgt": e.tgt, "inj": e.injective}
                  for e in g.edges],
        "shapes": [{"node": s.node, "labels": sorted(s.labels), "shape": s.shape}
                   for s in g.shapes],
        "root": g.root,
        "null": g.null,
    }


def serialize(g: AbstractGraph) -> bytes:
    return (json.dumps(graph_document(g), separators=(",", ":")) + "\n").encode("utf-8")


def _want(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise SchemaError(path, message)


def _parse_card(value, path: str) -> Interval:
    _want(isinstance(value, list) and len(value) == 2, path, "card must be [lo, hi]")
    lo, hi = value
    _want(isinstance(lo, int) and not isinstance(lo, bool) and lo >= 0, path,
          "card lower bound must be a natural number")
    if hi == "inf":
        return Interval(lo, None)
    _want(isinstance(hi, int) and not isinstance(hi, bool), path,
          'card upper bound must be an integer or "inf"')
    _want(hi >= lo, path, f"empty interval [{lo}, {hi}]")
    return Interval(lo, hi)


def deserialize(data: bytes | str) -> AbstractGraph:
    """Parse and validate an ahg-1 document."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError("<document>", f"not valid JSON: {exc}") from None
    _want(isinstance(doc, dict), "<document>", "top level must be an object")
    required = ("format", "nodes", "edges", "shapes", "root", "null")
    for key in doc:
        _want(key in required, key, "unknown top-level key")
    for key in required:
        _want(key in doc, "<document>", f"missing required key {key!r}")
    _want(doc["format"] == AHG_FORMAT, "format", f"unknown format {doc['format']!r}")
    _want(isinstance(doc["root"], int), "root", "must be an integer")
    _want(isinstance(doc["null"], int), "null", "must be an integer")

    nodes: list[AbstractNode] = []
    _want(isinstance(doc["nodes"], list), "nodes", "must be a list")
    for i, nd in enumerate(doc["nodes"]):
        path = f"nodes[{i}]"
        _want(isinstance(nd, dict), path, "must be an object")
        for key in nd:
            _want(key in ("id", "types", "card"), f"{path}.{key}", "unknown key")
        for key in ("id", "types", "card"):
            _want(key in nd, path, f"missing required key {key!r}")
        _want(isinstance(nd["id"], int), f"{path}.id", "must be an integer")
        _want(isinstance(nd["types"], list) and all(isinstance(t, str) for t in nd["types"]),
              f"{path}.types", "must be a list of strings")
        card = _parse_card(nd["card"], f"{path}.card")
        nodes.append(AbstractNode(nd["id"], frozenset(nd["types"]), card,
                                  is_root=nd["id"] == doc["root"],
                                  is_null=nd["id"] == doc["null"]))

    edges: list[AbstractEdge] = []
    _want(isinstance(doc["edges"], list), "edges", "must be a list")
    for i, ed in enumerate(doc["edges"]):
        path = f"edges[{i}]"
        _want(isinstance(ed, dict), path, "must be an object")
        for key in ed:
            _want(key in ("src", "label", "tgt", "inj"), f"{path}.{key}", "unknown key")
        for key in ("src", "label", "tgt", "inj"):
            _want(key in ed, path, f"missing required key {key!r}")
        _want(isinstance(ed["src"], int), f"{path}.src", "must be an integer")
        _want(isinstance(ed["tgt"], int), f"{path}.tgt", "must be an integer")
        _want(isinstance(ed["label"], str), f"{path}.label", "must be a string")
        _want(isinstance(ed["inj"], bool), f"{path}.inj", "must be a boolean")
        edges.append(AbstractEdge(ed["src"], ed["label"], ed["tgt"], ed["inj"]))

    shapes: list[ShapeFact] = []
    _want(isinstance(doc["shapes"], list), "shapes", "must be a list")
    for i, sd in enumerate(doc["shapes"]):
        path = f"shapes[{i}]"
        _want(isinstance(sd, dict), path, "must be an object")
        for key in sd:
            _want(key in ("node", "labels", "shape"), f"{path}.{key}", "unknown key")
        for key in ("node", "labels", "shape"):
            _want(key in sd, path, f"missing required key {key!r}")
        _want(isinstance(sd["node"], int), f"{path}.node", "must be an integer")
        _want(isinstance(sd["labels"], list) and all(isinstance(l, str) for l in sd["labels"]),
              f"{path}.labels", "must be a list of strings")
        _want(sd["shape"] in (TREE, ANY), f"{path}.shape", f'must be "{TREE}" or "{ANY}"')
        shapes.append(ShapeFact(sd["node"], frozenset(sd["labels"]), sd["shape"]))

    try:
        return AbstractGraph(nodes, edges, shapes, doc["root"], doc["null"])
    except ValueError as exc:
        raise SchemaError("<document>", str(exc)) from None
