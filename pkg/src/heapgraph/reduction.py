"""Dominator-based collapsing of abstract graphs, and object-level zoom.

Nodes pointed to by variables, and their immediate neighbors, stay expanded;
everything else folds into the reduced node of its nearest expanded dominator
ancestor.  Zoom re-runs the abstraction with chosen objects pinned so they
come out as individual nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

from .abstract_graph import AbstractEdge, AbstractGraph, EmbeddingMap, Interval
from .abstraction import (DEFAULT_OPTIONS, AbstractionOptions, abstract_heap)
from .diagnostics import NodeMetrics
from .heap_model import ConcreteHeap

ROOT_REDUCED = -1
NULL_REDUCED = 0


@dataclass(frozen=True)
class ReducedNode:
    id: int
    covered: frozenset[int]
    types: frozenset[str]
    card: Interval
    interesting: bool
    unreachable: bool = False
    bytes: int | None = None


@dataclass(frozen=True)
class Expansion:
    nodes: tuple[int, ...]
    internal_edges: tuple[AbstractEdge, ...]
    boundary_edges: tuple[AbstractEdge, ...]


class ReducedGraph:
    """Partition of an abstract graph's content nodes into reduced groups."""

    def __init__(self, graph: AbstractGraph, nodes: Iterable[ReducedNode],
                 edges: Iterable[tuple[int, int]],
                 var_edges: Iterable[tuple[str, int]]):
        self.graph = graph
        self.nodes: dict[int, ReducedNode] = {n.id: n for n in nodes}
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(set(edges)))
        self.var_edges: tuple[tuple[str, int], ...] = tuple(sorted(var_edges))
        self._home: dict[int, int] = {}
        for rn in self.nodes.values():
            for nid in rn.covered:
                self._home[nid] = rn.id

    def home(self, abstract_id: int) -> int:
        """Reduced node covering the given abstract node."""
        if abstract_id == self.graph.root:
            return ROOT_REDUCED
        if abstract_id == self.graph.null:
            return NULL_REDUCED
        return self._home[abstract_id]

    def expand(self, reduced_id: int) -> Expansion:
        return expand(self, reduced_id)


def _immediate_dominators(succs: dict[int, list[int]], root: int) -> dict[int, int]:
    """Iterative dataflow idom computation over a rooted digraph."""
    order: list[int] = []
    seen = {root}
    stack: list[tuple[int, int]] = [(root, 0)]
    while stack:
        node, i = stack[-1]
        children = succs.get(node, [])
        if i < len(children):
            stack[-1] = (node, i + 1)
            child = children[i]
            if child not in seen:
                seen.add(child)
                stack.append((child, 0))
        else:
            stack.pop()
            order.append(node)
    order.reverse()  # reverse postorder
    rpo = {n: i for i, n in enumerate(order)}
    preds: dict[int, list[int]] = {n: [] for n in order}
    for n in order:
        for m in succs.get(n, []):
            if m in rpo:
                preds[m].append(n)

    idom: dict[int, int] = {root: root}

    def intersect(a: int, b: int) -> int:
        while a != b:
            while rpo[a] > rpo[b]:
                a = idom[a]
            while rpo[b] > rpo[a]:
                b = idom[b]
        return a

    changed = True
    while changed:
        changed = False
        for n in order:
            if n == root:
                continue
            candidates = [p for p in preds[n] if p in idom]
            if not candidates:
                continue
            new = candidates[0]
            for p in candidates[1:]:
                new = intersect(new, p)
            if idom.get(n) != new:
                idom[n] = new
                changed = True
    return idom


def reduce(g: AbstractGraph, metrics: list[NodeMetrics] | None = None,
           successors_only: bool = False) -> ReducedGraph:
    """Collapse the graph around its variable-pointed nodes.

    Interesting nodes (variable targets plus their immediate neighbors) anchor
    reduced groups; other nodes join the group of their nearest anchor in the
    dominator tree.  Nodes unreachable from the root land in one distinguished
    unreachable group.
    """
    content = set(g.content_ids())
    var_targets = {e.tgt for e in g.var_edges() if e.tgt != g.null}

    interesting = set(var_targets)
    for t in var_targets:
        interesting.update(e.tgt for e in g.out_edges(t) if e.tgt != g.null)
        if not successors_only:
            interesting.update(e.src for e in g.in_edges(t) if e.src != g.root)
    interesting &= content

    # Reachability over content nodes.
    reachable: set[int] = set()
    stack = [t for t in var_targets]
    while stack:
        n = stack.pop()
        if n in reachable:
            continue
        reachable.add(n)
        stack.extend(e.tgt for e in g.out_edges(n)
                     if e.tgt in content and e.tgt not in reachable)
    interesting &= reachable

    # Dominators with in-edges to interesting nodes cut; the root reaches every
    # interesting node directly, so those have no dominators besides the root.
    succs: dict[int, list[int]] = {g.root: sorted(var_targets | interesting)}
    for n in sorted(reachable):
        succs[n] = sorted({e.tgt for e in g.out_edges(n)
                           if e.tgt in reachable and e.tgt not in interesting
                           and e.tgt != n})
    idom = _immediate_dominators(succs, g.root)

    anchors = set(interesting)
    for n in reachable:
        if n not in anchors and idom.get(n, g.root) == g.root:
            anchors.add(n)

    home: dict[int, int] = {}
    for n in reachable:
        cur = n
        while cur not in anchors:
            cur = idom.get(cur, g.root)
            if cur == g.root:
                break
        home[n] = cur if cur in anchors else n

    groups: dict[int, set[int]] = {}
    for n, anchor in home.items():
        groups.setdefault(anchor, set()).add(n)

    unreachable = content - reachable

    by_metrics = {m.node: m for m in metrics} if metrics else {}

    def aggregate(rid: int, covered: set[int], is_interesting: bool,
                  is_unreachable: bool = False) -> ReducedNode:
        types = frozenset(t for n in covered for t in g.node(n).types)
        card = Interval(0, 0)
        for n in covered:
            card = card.plus(g.node(n).card)
        total = None
        if by_metrics:
            total = sum(by_metrics[n].total_bytes for n in covered if n in by_metrics)
        return ReducedNode(rid, frozenset(covered), types, card,
                           is_interesting, is_unreachable, total)

    nodes = [ReducedNode(ROOT_REDUCED, frozenset(), frozenset(), Interval.exact(1),
                         False),
             ReducedNode(NULL_REDUCED, frozenset(), frozenset(), Interval.exact(1),
                         False)]
    rid_of: dict[int, int] = {}
    next_id = 1
    for anchor in sorted(groups):
        rid_of[anchor] = next_id
        nodes.append(aggregate(next_id, groups[anchor], anchor in interesting))
        next_id += 1
    if unreachable:
        nodes.append(aggregate(next_id, unreachable, False, is_unreachable=True))
        unreachable_rid = next_id
    else:
        unreachable_rid = None

    def reduced_of(abstract_id: int) -> int:
        if abstract_id == g.root:
            return ROOT_REDUCED
        if abstract_id == g.null:
            return NULL_REDUCED
        if abstract_id in reachable:
            return rid_of[home[abstract_id]]
        return unreachable_rid

    edges = set()
    var_edges = []
    for e in g.edges:
        if e.src == g.root:
            var_edges.append((e.label, reduced_of(e.tgt)))
            continue
        ru, rv = reduced_of(e.src), reduced_of(e.tgt)
        if ru != rv:
            edges.add((ru, rv))

    return ReducedGraph(g, nodes, edges, var_edges)


def expand(r: ReducedGraph, reduced_id: int) -> Expansion:
    """The abstract subgraph a reduced node covers, plus its boundary edges."""
    if reduced_id not in r.nodes:
        raise KeyError(f"unknown reduced node {reduced_id}")
    covered = r.nodes[reduced_id].covered
    internal = []
    boundary = []
    for e in r.graph.edges:
        src_in, tgt_in = e.src in covered, e.tgt in covered
        if src_in and tgt_in:
            internal.append(e)
        elif src_in or tgt_in:
            boundary.append(e)
    return Expansion(tuple(sorted(covered)), tuple(internal), tuple(boundary))


def zoom(h: ConcreteHeap, interesting: Iterable[int],
         opts: AbstractionOptions = DEFAULT_OPTIONS
         ) -> tuple[AbstractGraph, EmbeddingMap]:
    """Re-abstract with the given objects pinned to singleton nodes."""
    pins = frozenset(interesting)
    unknown = pins - h.object_ids()
    if unknown:
        raise ValueError(f"unknown object ids: {sorted(unknown)}")
    return abstract_heap(h, replace(opts, interesting_objects=pins))
