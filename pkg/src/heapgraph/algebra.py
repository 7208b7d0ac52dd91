"""Compare and merge operations over abstract heap graphs.

compare approximates the semantic order between two graphs: it builds a
structural matching from the roots outward (possible because same-label
out-edges of a node have disjoint target type sets), then checks that every
node and edge property of the first graph is covered by the second.  merge
produces an upper approximation of both inputs by disjoint union followed by
the same congruence closure the abstraction uses, with node and edge
properties recomputed conservatively from the preimage maps.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .abstract_graph import (AbstractEdge, AbstractGraph, AbstractNode,
                             Interval, ShapeFact, ZERO)
from .heap_model import ANY, TREE, RecursiveRelation

MAX_DIFFS = 100

JOIN = "join"
WIDEN = "widen"


class AmbiguousGraphError(ValueError):
    """Input graph violates the disjoint-target precondition, so edge matching
    would be ambiguous."""

    def __init__(self, node: int, label: str):
        super().__init__(
            f"node {node} has same-label ({label!r}) out-edges with overlapping "
            f"target type sets")
        self.node = node
        self.label = label


@dataclass(frozen=True)
class Diff:
    kind: str
    subject: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "subject": self.subject}


@dataclass(frozen=True)
class IsomorphismMap:
    nodes: dict[int, int]
    edges: dict[tuple[int, str, int], tuple[int, str, int]]


@dataclass(frozen=True)
class CompareResult:
    leq: bool
    phi: IsomorphismMap | None
    diffs: tuple[Diff, ...]

    def to_json(self) -> dict:
        return {"result": "leq" if self.leq else "incomparable",
                "diffs": [d.to_json() for d in self.diffs]}


def check_disjoint_targets(g: AbstractGraph) -> None:
    """Raise if any node has same-label out-edges with intersecting target types."""
    for nid in g.nodes:
        by_label: dict[str, list[frozenset[str]]] = {}
        for e in g.out_edges(nid):
            if e.tgt == g.null:
                continue
            by_label.setdefault(e.label, []).append(g.node(e.tgt).types)
        for label, sets in by_label.items():
            for i in range(len(sets)):
                for j in range(i + 1, len(sets)):
                    if sets[i] & sets[j]:
                        raise AmbiguousGraphError(nid, label)


def compare(g1: AbstractGraph, g2: AbstractGraph) -> CompareResult:
    """Approximate order test: LEQ(phi) when every concretization of g1 is one
    of g2, as witnessed by a structural matching phi; otherwise the list of
    mismatches, most-significant first."""
    check_disjoint_targets(g1)
    check_disjoint_targets(g2)

    diffs: list[Diff] = []
    phi: dict[int, int] = {g1.root: g2.root, g1.null: g2.null}
    taken: dict[int, int] = {g2.root: g1.root, g2.null: g1.null}
    edge_map: dict[tuple[int, str, int], tuple[int, str, int]] = {}
    queue: deque[int] = deque([g1.root])
    visited = {g1.root}

    while queue:
        a = queue.popleft()
        b = phi[a]
        for e1 in g1.out_edges(a):
            if e1.tgt == g1.null:
                if g2.has_edge(b, e1.label, g2.null):
                    edge_map[e1.key()] = (b, e1.label, g2.null)
                else:
                    diffs.append(Diff("unmatched-edge",
                                      f"g1 edge {e1.key()} (to null) has no counterpart"))
                continue
            t1_types = g1.node(e1.tgt).types
            candidates = [e2 for e2 in g2.out_edges(b)
                          if e2.label == e1.label and e2.tgt != g2.null
                          and g2.node(e2.tgt).types & t1_types]
            if not candidates:
                diffs.append(Diff("unmatched-edge",
                                  f"g1 edge {e1.key()} has no counterpart under phi"))
                continue
            if len(candidates) > 1:
                diffs.append(Diff("ambiguous-edge",
                                  f"g1 edge {e1.key()} matches several g2 edges"))
                continue
            e2 = candidates[0]
            prev = phi.get(e1.tgt)
            if prev is not None and prev != e2.tgt:
                diffs.append(Diff("mapping-conflict",
                                  f"g1 node {e1.tgt} would map to both {prev} and {e2.tgt}"))
                continue
            if prev is None:
                owner = taken.get(e2.tgt)
                if owner is not None and owner != e1.tgt:
                    diffs.append(Diff("mapping-conflict",
                                      f"g2 node {e2.tgt} would cover both g1 nodes "
                                      f"{owner} and {e1.tgt}"))
                    continue
                phi[e1.tgt] = e2.tgt
                taken[e2.tgt] = e1.tgt
            edge_map[e1.key()] = e2.key()
            if e1.tgt not in visited:
                visited.add(e1.tgt)
                queue.append(e1.tgt)

    for a in sorted(phi):
        b = phi[a]
        n1, n2 = g1.node(a), g2.node(b)
        if not n1.types <= n2.types:
            diffs.append(Diff("type-excess",
                              f"g1 node {a} types {sorted(n1.types - n2.types)} missing "
                              f"from g2 node {b}"))
        if not n1.card.issubset(n2.card):
            diffs.append(Diff("cardinality-excess",
                              f"g1 node {a} card {n1.card} not within g2 node {b} "
                              f"card {n2.card}"))

    for k1, k2 in sorted(edge_map.items()):
        e1 = next(e for e in g1.out_edges(k1[0]) if e.key() == k1)
        e2 = next(e for e in g2.out_edges(k2[0]) if e.key() == k2)
        if e2.injective and not e1.injective:
            diffs.append(Diff("injectivity-weakening",
                              f"g2 edge {k2} claims injectivity, g1 edge {k1} does not"))

    for fact in g2.shapes:
        if fact.shape != TREE or fact.node not in taken:
            continue
        n1 = taken[fact.node]
        granted = any(f.shape == TREE and fact.labels <= f.labels
                      for f in g1.shape_facts(n1))
        if not granted:
            diffs.append(Diff("shape-weakening",
                              f"g2 requires tree{sorted(fact.labels)} on node "
                              f"{fact.node}, g1 node {n1} cannot guarantee it"))

    diffs = sorted(set(diffs), key=lambda d: (d.kind, d.subject))[:MAX_DIFFS]
    if diffs:
        return CompareResult(False, None, tuple(diffs))
    return CompareResult(True, IsomorphismMap(phi, edge_map), ())


# --- merge -------------------------------------------------------------------


@dataclass(frozen=True)
class MergeResult:
    graph: AbstractGraph
    eta1_nodes: dict[int, int]
    eta1_edges: dict[tuple[int, str, int], tuple[int, str, int]]
    eta2_nodes: dict[int, int]
    eta2_edges: dict[tuple[int, str, int], tuple[int, str, int]]
    mode: str


class _MergeState:
    """Union-find over the disjoint union of two graphs' nodes."""

    def __init__(self, g1: AbstractGraph, g2: AbstractGraph):
        self.items: list[tuple[int, int]] = []  # (graph tag, node id)
        self.slot: dict[tuple[int, int], int] = {}
        for tag, g in ((1, g1), (2, g2)):
            for nid in sorted(g.nodes):
                self.slot[(tag, nid)] = len(self.items)
                self.items.append((tag, nid))
        total = len(self.items)
        self.parent = list(range(total))
        self.size = [1] * total
        self.types: list[set[str]] = [set((g1 if tag == 1 else g2).node(nid).types)
                                      for tag, nid in self.items]
        # Edges as (src slot, label, tgt slot, tag, original key)
        self.edges: list[tuple[int, str, int, int, tuple[int, str, int]]] = []
        for tag, g in ((1, g1), (2, g2)):
            for e in g.edges:
                self.edges.append((self.slot[(tag, e.src)], e.label,
                                   self.slot[(tag, e.tgt)], tag, e.key()))
        self.out_edges: list[list[int]] = [[] for _ in range(total)]
        self.in_edges: list[list[int]] = [[] for _ in range(total)]
        for i, (src, _, tgt, _, _) in enumerate(self.edges):
            self.out_edges[src].append(i)
            self.in_edges[tgt].append(i)
        self.null_slots = {self.slot[(1, g1.null)], self.slot[(2, g2.null)]}
        self.root_slots = {self.slot[(1, g1.root)], self.slot[(2, g2.root)]}
        self.dirty: deque[int] = deque()
        self.in_dirty = [False] * total

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> int:
        a, b = self.find(a), self.find(b)
        if a == b:
            return a
        if self.size[a] < self.size[b]:
            a, b = b, a
        self.parent[b] = a
        self.size[a] += self.size[b]
        self.types[a] |= self.types[b]
        self.types[b] = set()
        self.out_edges[a].extend(self.out_edges[b])
        self.out_edges[b] = []
        self.in_edges[a].extend(self.in_edges[b])
        self.in_edges[b] = []
        self.mark_dirty(a)
        for i in self.in_edges[a]:
            self.mark_dirty(self.edges[i][0])
        return a

    def mark_dirty(self, x: int) -> None:
        x = self.find(x)
        if not self.in_dirty[x]:
            self.in_dirty[x] = True
            self.dirty.append(x)


def merge(g1: AbstractGraph, g2: AbstractGraph, mode: str = JOIN,
          rel: RecursiveRelation | None = None) -> MergeResult:
    """Merge two graphs into an upper approximation of both.

    mode selects how cardinalities combine: interval hull (JOIN) or hull with
    the upper bound widened to infinity when it grew past the first graph's
    bound (WIDEN).  rel, when given, lets adjacent nodes with types from a
    common recursive group collapse, mirroring the first abstraction phase.
    """
    if mode not in (JOIN, WIDEN):
        raise ValueError(f"unknown merge mode {mode!r}")
    st = _MergeState(g1, g2)

    root1 = st.slot[(1, g1.root)]
    st.union(root1, st.slot[(2, g2.root)])
    null1 = st.slot[(1, g1.null)]
    st.union(null1, st.slot[(2, g2.null)])

    # Same-named variables point into the same merged region.
    vars1 = {e.label: e.tgt for e in g1.var_edges()}
    vars2 = {e.label: e.tgt for e in g2.var_edges()}
    for name in sorted(set(vars1) & set(vars2)):
        t1, t2 = vars1[name], vars2[name]
        if t1 != g1.null and t2 != g2.null:
            st.union(st.slot[(1, t1)], st.slot[(2, t2)])

    def excluded(slot_rep: int) -> bool:
        f = st.find(slot_rep)
        return f == st.find(null1) or f == st.find(root1)

    # Closure: recursive-group adjacency plus predecessor equivalence.
    for x in range(len(st.items)):
        if st.find(x) == x and st.out_edges[x]:
            st.mark_dirty(x)
    while st.dirty:
        s = st.dirty.popleft()
        st.in_dirty[st.find(s)] = False
        s = st.find(s)
        if not st.out_edges[s]:
            continue
        if rel is not None:
            for i in list(st.out_edges[s]):
                src, _, tgt, _, _ = st.edges[i]
                fs, ft = st.find(src), st.find(tgt)
                if fs == ft or excluded(fs) or excluded(ft):
                    continue
                if any(rel.related_names(a, b)
                       for a in st.types[fs] for b in st.types[ft]):
                    st.union(fs, ft)
            s = st.find(s)
        buckets: dict[str, list[int]] = {}
        for i in st.out_edges[s]:
            buckets.setdefault(st.edges[i][1], []).append(st.edges[i][2])
        for targets in buckets.values():
            kept: list[int] = []
            for t in targets:
                t = st.find(t)
                if excluded(t):
                    continue
                merged = t
                changed = True
                while changed:
                    changed = False
                    for k in list(kept):
                        fk = st.find(k)
                        if fk == merged:
                            kept.remove(k)
                            changed = True
                            continue
                        if st.types[fk] & st.types[merged]:
                            kept.remove(k)
                            merged = st.union(fk, merged)
                            changed = True
                            s = st.find(s)
                if merged not in kept:
                    kept.append(merged)

    # Assemble the result graph with fresh ids.
    rep_members: dict[int, list[tuple[int, int]]] = {}
    for x, item in enumerate(st.items):
        rep_members.setdefault(st.find(x), []).append(item)
    root_rep = st.find(root1)
    null_rep = st.find(null1)
    node_id: dict[int, int] = {root_rep: -1, null_rep: 0}
    content = sorted((rep for rep in rep_members
                      if rep not in (root_rep, null_rep)),
                     key=lambda rep: sorted(rep_members[rep]))
    for i, rep in enumerate(content):
        node_id[rep] = i + 1

    eta1_nodes = {nid: node_id[st.find(st.slot[(1, nid)])] for nid in g1.nodes}
    eta2_nodes = {nid: node_id[st.find(st.slot[(2, nid)])] for nid in g2.nodes}

    def summed_card(rep: int, tag: int, g: AbstractGraph) -> Interval:
        total = ZERO
        for t, nid in rep_members[rep]:
            if t == tag:
                total = total.plus(g.node(nid).card)
        return total

    nodes = []
    for rep, members in rep_members.items():
        types = frozenset(st.types[rep])
        s1 = summed_card(rep, 1, g1)
        s2 = summed_card(rep, 2, g2)
        hull = s1.hull(s2)
        if mode == WIDEN:
            grew = hull.hi is None and s1.hi is not None or (
                hull.hi is not None and s1.hi is not None and hull.hi > s1.hi)
            card = Interval(hull.lo, None) if (grew or s1.hi is None) else hull
        else:
            card = hull
        if rep == root_rep or rep == null_rep:
            card = Interval.exact(1)
        nodes.append(AbstractNode(node_id[rep], types, card,
                                  is_root=rep == root_rep, is_null=rep == null_rep))

    groups: dict[tuple[int, str, int], list[int]] = {}
    for i, (src, label, tgt, _, _) in enumerate(st.edges):
        key = (node_id[st.find(src)], label, node_id[st.find(tgt)])
        groups.setdefault(key, []).append(i)

    lookup = {1: {e.key(): e for e in g1.edges},
              2: {e.key(): e for e in g2.edges}}
    edges = []
    eta1_edges: dict[tuple[int, str, int], tuple[int, str, int]] = {}
    eta2_edges: dict[tuple[int, str, int], tuple[int, str, int]] = {}
    for key, idxs in groups.items():
        injective = True
        for tag in (1, 2):
            own_keys = [st.edges[i][4] for i in idxs if st.edges[i][3] == tag]
            tgts = [k[2] for k in own_keys]
            if len(set(tgts)) != len(tgts):
                injective = False
            if not all(lookup[tag][k].injective for k in own_keys):
                injective = False
        edges.append(AbstractEdge(key[0], key[1], key[2], injective))
        for i in idxs:
            _, _, _, tag, orig_key = st.edges[i]
            (eta1_edges if tag == 1 else eta2_edges)[orig_key] = key

    shapes = _merged_shapes(g1, g2, rep_members, node_id, root_rep, null_rep, edges)

    graph = AbstractGraph(nodes, edges, shapes, -1, 0)
    return MergeResult(graph, eta1_nodes, eta1_edges, eta2_nodes, eta2_edges, mode)


def _merged_shapes(g1, g2, rep_members, node_id, root_rep, null_rep,
                   edges) -> list[ShapeFact]:
    """Treeness survives a merge only when at most one node from each input
    maps into the region and that node granted a covering tree fact."""
    self_labels: dict[int, set[str]] = {}
    for e in edges:
        if e.src == e.tgt:
            self_labels.setdefault(e.src, set()).add(e.label)

    shapes: list[ShapeFact] = []
    for rep, members in rep_members.items():
        if rep in (root_rep, null_rep):
            continue
        nid = node_id[rep]
        labels = frozenset(self_labels.get(nid, set()))
        grant_sets: list[list[frozenset[str]]] = []
        ok = True
        for tag, g in ((1, g1), (2, g2)):
            own = [m for t, m in members if t == tag]
            if len(own) > 1:
                ok = False
                break
            if not own:
                continue
            tree_sets = [f.labels for f in g.shape_facts(own[0]) if f.shape == TREE]
            if not tree_sets:
                ok = False
                break
            grant_sets.append(tree_sets)
        granted: list[frozenset[str]] = []
        if ok:
            candidates = {labels}
            for tree_sets in grant_sets:
                candidates = {c & ts for c in candidates for ts in tree_sets}
            for c in sorted(candidates, key=lambda s: (-len(s), sorted(s))):
                if not any(c < kept for kept in granted):
                    granted.append(c)
        if any(c == labels for c in granted):
            shapes.append(ShapeFact(nid, labels, TREE))
            continue
        shapes.append(ShapeFact(nid, labels, ANY))
        shapes.extend(ShapeFact(nid, c, TREE)
                      for c in sorted(granted, key=lambda s: sorted(s)))
    return shapes
