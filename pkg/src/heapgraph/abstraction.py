"""Computation of abstract heap graphs from concrete heaps.

Three phases: (1) collapse recursive data structures by following pointers
between objects whose types share a recursive type group, (2) close under
predecessor equivalence (same source partition, same label, overlapping
target types) with a worklist, (3) derive node and edge properties.  The
partition is maintained in a union-find structure; the witness map from
objects to partitions falls out of it directly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .abstract_graph import (ELEMENT_LABEL, AbstractEdge, AbstractGraph,
                             AbstractNode, EmbeddingMap, Interval, ShapeFact,
                             abstract_label_of)
from .heap_model import (ANY, NULL_ID, ROOT_ID, TREE, ConcreteHeap,
                         RecursiveRelation, pointers_between,
                         recursive_relation)

ROOT_NODE = -1
NULL_NODE = 0


@dataclass(frozen=True)
class AbstractionOptions:
    """Knobs for the abstraction run.

    opaque_type_names: name prefixes whose objects keep no out-pointers
    transparent_containers: exact type names exempted from opaque matching
    shape_subset_limit: max label count for exhaustive shape subset search
    interesting_objects: object ids pinned to singleton partitions
    """

    opaque_type_names: tuple[str, ...] = ()
    transparent_containers: frozenset[str] = frozenset()
    shape_subset_limit: int = 4
    interesting_objects: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.shape_subset_limit < 1:
            raise ValueError("shape_subset_limit must be >= 1")

    def is_opaque(self, type_name: str) -> bool:
        if type_name in self.transparent_containers:
            return False
        return any(type_name.startswith(p) for p in self.opaque_type_names)


DEFAULT_OPTIONS = AbstractionOptions()


class PartitionState:
    """Union-find over object ids plus the pointer tables the phases work on.

    Dense indices: objects take 0..n-1, null n, root n+1.  Partition data
    (type sets, member counts, incident pointer lists) lives at the current
    representative and is merged small-into-large on union.
    """

    def __init__(self, h: ConcreteHeap, opts: AbstractionOptions = DEFAULT_OPTIONS):
        self.heap = h
        self.opts = opts
        ids = sorted(h.objects)
        self.index = {oid: i for i, oid in enumerate(ids)}
        self.ids = ids
        n = len(ids)
        self.null_idx = n
        self.root_idx = n + 1
        self.index[NULL_ID] = self.null_idx
        self.index[ROOT_ID] = self.root_idx

        total = n + 2
        self.parent = list(range(total))
        self.size = [1] * total
        self.min_id = [ids[i] if i < n else 0 for i in range(total)]
        self.pinned = [False] * total
        self.pinned[self.null_idx] = True
        self.pinned[self.root_idx] = True
        for oid in opts.interesting_objects:
            if oid not in h.objects:
                raise ValueError(f"interesting object {oid} is not in the heap")
            self.pinned[self.index[oid]] = True

        # Type sets are small per-partition sets of type ids.
        self.type_sets: list[set[int]] = [set() for _ in range(total)]
        tt = h.type_table
        self.type_ids = [0] * n
        for oid, obj in h.objects.items():
            i = self.index[oid]
            self.type_ids[i] = obj.type
            self.type_sets[i].add(obj.type)

        # Pointer arrays; element labels are identified (label id 0).
        label_ids: dict[str, int] = {}
        self.label_names: list[str] = [ELEMENT_LABEL]
        psrc: list[int] = []
        plab: list[int] = []
        ptgt: list[int] = []
        pconc: list = []  # concrete labels, for edge grouping and shape work

        def lab_id(name: str) -> int:
            li = label_ids.get(name)
            if li is None:
                li = len(self.label_names)
                label_ids[name] = li
                self.label_names.append(name)
            return li

        for oid, obj in h.objects.items():
            if opts.is_opaque(tt.decl(obj.type).name):
                continue
            src = self.index[oid]
            for label, tgt in obj.pointers():
                psrc.append(src)
                if isinstance(label, int):
                    plab.append(0)
                else:
                    plab.append(lab_id(label))
                ptgt.append(self.index[tgt])
                pconc.append(label)
        for name in sorted(h.roots):
            psrc.append(self.root_idx)
            plab.append(lab_id(name))
            ptgt.append(self.index[h.roots[name]])
            pconc.append(name)
        self.psrc = psrc
        self.plab = plab
        self.ptgt = ptgt
        self.pconc = pconc

        self.out_ptrs: list[list[int]] = [[] for _ in range(total)]
        self.in_ptrs: list[list[int]] = [[] for _ in range(total)]
        for p in range(len(psrc)):
            self.out_ptrs[psrc[p]].append(p)
            self.in_ptrs[ptgt[p]].append(p)

        self.dirty: deque[int] = deque()
        self.in_dirty = [False] * total
        self.track_dirty = False

    # union-find with path halving and union by size
    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> int:
        """Union two partitions.

        With tracking on, pointers incident to a merged partition re-enter the
        worklist; a side's in-pointer sources only need rechecking when the
        other side contributed new types (disjointness tests cannot change
        otherwise).
        """
        a, b = self.find(a), self.find(b)
        if a == b:
            return a
        if self.pinned[a] or self.pinned[b]:
            raise ValueError("pinned partitions can never be merged")
        if self.size[a] < self.size[b]:
            a, b = b, a
        a_gained = not self.type_sets[b] <= self.type_sets[a]
        b_gained = not self.type_sets[a] <= self.type_sets[b]
        old_in_a = len(self.in_ptrs[a])
        self.parent[b] = a
        self.size[a] += self.size[b]
        self.min_id[a] = min(self.min_id[a], self.min_id[b])
        if len(self.type_sets[b]) > len(self.type_sets[a]):
            self.type_sets[a], self.type_sets[b] = self.type_sets[b], self.type_sets[a]
        self.type_sets[a] |= self.type_sets[b]
        self.type_sets[b] = set()
        self.out_ptrs[a].extend(self.out_ptrs[b])
        self.out_ptrs[b] = []
        self.in_ptrs[a].extend(self.in_ptrs[b])
        self.in_ptrs[b] = []
        if self.track_dirty:
            self.mark_dirty(a)
            if b_gained:
                for p in self.in_ptrs[a][old_in_a:]:
                    self.mark_dirty(self.psrc[p])
            if a_gained:
                for p in self.in_ptrs[a][:old_in_a]:
                    self.mark_dirty(self.psrc[p])
        return a

    def mark_dirty(self, x: int) -> None:
        x = self.find(x)
        if not self.in_dirty[x]:
            self.in_dirty[x] = True
            self.dirty.append(x)

    def mu(self, object_id: int) -> int:
        """Current partition id (minimum member object id) for an object."""
        return self.min_id[self.find(self.index[object_id])]

    def partitions(self) -> dict[int, list[int]]:
        """Representative object id -> sorted member object ids."""
        out: dict[int, list[int]] = {}
        for oid in self.ids:
            out.setdefault(self.min_id[self.find(self.index[oid])], []).append(oid)
        return {k: sorted(v) for k, v in out.items()}


def phase1_same_structure(h: ConcreteHeap, rel: RecursiveRelation,
                          st: PartitionState) -> PartitionState:
    """Union endpoints of pointers between objects of mutually recursive types."""
    n = len(st.ids)
    for p in range(len(st.psrc)):
        src, tgt = st.psrc[p], st.ptgt[p]
        if src >= n or tgt >= n:
            continue
        fs, ft = st.find(src), st.find(tgt)
        if fs == ft or st.pinned[fs] or st.pinned[ft]:
            continue
        if rel.related(st.type_ids[src], st.type_ids[tgt]):
            st.union(fs, ft)
    return st


def phase2_predecessor_closure(h: ConcreteHeap, st: PartitionState) -> PartitionState:
    """Least fixpoint of target merging for same-source, same-label pointers
    whose target partitions have overlapping type sets."""
    st.track_dirty = True
    for x in range(len(st.parent)):
        if st.find(x) == x and st.out_ptrs[x]:
            st.mark_dirty(x)
    null_idx, root_idx = st.null_idx, st.root_idx
    while st.dirty:
        s = st.dirty.popleft()
        st.in_dirty[st.find(s)] = False
        s = st.find(s)
        if not st.out_ptrs[s]:
            continue
        buckets: dict[int, list[int]] = {}
        for p in st.out_ptrs[s]:
            buckets.setdefault(st.plab[p], []).append(st.ptgt[p])
        for targets in buckets.values():
            kept: list[int] = []
            for t in targets:
                t = st.find(t)
                if t == null_idx or t == root_idx or st.pinned[t]:
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
                        if st.type_sets[fk] & st.type_sets[merged]:
                            kept.remove(k)
                            merged = st.union(fk, merged)
                            changed = True
                            s = st.find(s)
                if merged not in kept:
                    kept.append(merged)
    return st


def _is_forest(edges) -> bool:
    """Acyclic and in-degree <= 1 over the nodes the edges touch."""
    indeg: dict[int, int] = {}
    succs: dict[int, list[int]] = {}
    nodes: set[int] = set()
    for s, _, t in edges:
        nodes.add(s)
        nodes.add(t)
        indeg[t] = indeg.get(t, 0) + 1
        if indeg[t] > 1:
            return False
        succs.setdefault(s, []).append(t)
    queue = [n for n in nodes if n not in indeg]
    seen = 0
    while queue:
        node = queue.pop()
        seen += 1
        for t in succs.get(node, ()):
            indeg[t] -= 1
            if indeg[t] == 0:
                queue.append(t)
    return seen == len(nodes)


def compute_shape(h: ConcreteHeap, members, intra_labels: frozenset[str],
                  limit: int, intra=None) -> list[ShapeFact]:
    """Shape facts for one partition.

    When the full label set already forms a forest that single fact is all
    there is.  Otherwise the fact (n, all labels, any) is recorded along with
    every maximal tree subset: exhaustively for small label sets, by greedy
    violation-driven label elimination beyond the limit.
    """
    members = frozenset(members)
    node_id = min(members)
    if intra is None:
        intra = sorted(pointers_between(h, members, members),
                       key=lambda p: (p[0], str(p[1]), p[2]))

    def edges_for(subset: frozenset[str]):
        if not subset:
            return []
        box = ELEMENT_LABEL in subset
        return [(s, l, t) for (s, l, t) in intra
                if (isinstance(l, int) and box) or (isinstance(l, str) and l in subset)]

    def is_tree(subset: frozenset[str]) -> bool:
        return _is_forest(edges_for(subset))

    if is_tree(intra_labels):
        return [ShapeFact(node_id, intra_labels, TREE)]

    facts = [ShapeFact(node_id, intra_labels, ANY)]
    labels = sorted(intra_labels)
    if len(labels) <= limit:
        subsets = []
        for mask in range(1 << len(labels)):
            subset = frozenset(labels[i] for i in range(len(labels)) if mask >> i & 1)
            if is_tree(subset):
                subsets.append(subset)
        subsets.sort(key=len, reverse=True)
        maximal: list[frozenset[str]] = []
        for s in subsets:
            if not any(s < kept for kept in maximal):
                maximal.append(s)
        facts.extend(ShapeFact(node_id, s, TREE)
                     for s in sorted(maximal, key=lambda s: sorted(s)))
        return facts

    current = intra_labels
    for _ in range(len(labels)):
        violations = _shape_violations(h, members, intra, current)
        if not violations:
            facts.append(ShapeFact(node_id, current, TREE))
            return facts
        worst = max(sorted(violations), key=lambda l: violations[l])
        current = current - {worst}
    if is_tree(current):
        facts.append(ShapeFact(node_id, current, TREE))
    return facts


def _shape_violations(h: ConcreteHeap, members: frozenset[int], intra,
                      subset: frozenset[str]) -> dict[str, int]:
    """Per-abstract-label counts of forest violations (extra in-edges, cycle edges)."""
    box = ELEMENT_LABEL in subset
    edges = [(s, l, t) for (s, l, t) in intra
             if (isinstance(l, int) and box) or (isinstance(l, str) and l in subset)]
    counts: dict[str, int] = {}
    indeg: dict[int, list] = {}
    for s, l, t in edges:
        indeg.setdefault(t, []).append(abstract_label_of(l))
    for t, labs in indeg.items():
        for lab in labs[1:]:
            counts[lab] = counts.get(lab, 0) + 1
    # Kahn peel; every edge still inside the cyclic core charges its label.
    deg = {t: len(labs) for t, labs in indeg.items()}
    succs: dict[int, list[tuple[int, str]]] = {}
    for s, l, t in edges:
        succs.setdefault(s, []).append((t, abstract_label_of(l)))
    queue = [m for m in members if deg.get(m, 0) == 0]
    dead = set()
    while queue:
        node = queue.pop()
        dead.add(node)
        for t, _ in succs.get(node, ()):
            deg[t] -= 1
            if deg[t] == 0:
                queue.append(t)
    for s, l, t in edges:
        if s not in dead and t not in dead:
            lab = abstract_label_of(l)
            counts[lab] = counts.get(lab, 0) + 1
    return counts


def compute_properties(h: ConcreteHeap, st: PartitionState,
                       opts: AbstractionOptions = DEFAULT_OPTIONS) -> AbstractGraph:
    """Emit the abstract graph for a closed partition state."""
    tt = h.type_table
    n = len(st.ids)

    def node_of_idx(i: int) -> int:
        f = st.find(i)
        if f == st.null_idx:
            return NULL_NODE
        if f == st.root_idx:
            return ROOT_NODE
        return st.min_id[f]

    parts = st.partitions()
    nodes = [AbstractNode(ROOT_NODE, frozenset(), Interval.exact(1), is_root=True),
             AbstractNode(NULL_NODE, frozenset(), Interval.exact(1), is_null=True)]
    for rep, members in parts.items():
        names = frozenset(tt.decl(h.objects[m].type).name for m in members)
        nodes.append(AbstractNode(rep, names, Interval.exact(len(members))))

    groups: dict[tuple[int, str, int], list[int]] = {}
    intra: dict[int, list] = {}
    ids = st.ids
    for p in range(len(st.psrc)):
        src = node_of_idx(st.psrc[p])
        tgt = node_of_idx(st.ptgt[p])
        key = (src, st.label_names[st.plab[p]], tgt)
        groups.setdefault(key, []).append(p)
        if src == tgt and src not in (ROOT_NODE, NULL_NODE):
            intra.setdefault(src, []).append(
                (ids[st.psrc[p]], st.pconc[p], ids[st.ptgt[p]]))

    edges = []
    for (src, label, tgt), ptrs in groups.items():
        tgt_ids = [st.ptgt[p] for p in ptrs]
        injective = len(set(tgt_ids)) == len(tgt_ids)
        edges.append(AbstractEdge(src, label, tgt, injective))

    shapes: list[ShapeFact] = []
    for rep, members in parts.items():
        own = intra.get(rep, [])
        intra_labels = frozenset(abstract_label_of(l) for (_, l, _) in own)
        shapes.extend(compute_shape(h, frozenset(members), intra_labels,
                                    opts.shape_subset_limit, intra=own))

    return AbstractGraph(nodes, edges, shapes, ROOT_NODE, NULL_NODE)


def abstract_heap(h: ConcreteHeap,
                  opts: AbstractionOptions = DEFAULT_OPTIONS
                  ) -> tuple[AbstractGraph, EmbeddingMap]:
    """Full pipeline: partition the heap and derive the abstract graph plus
    the witness map used by the soundness checker."""
    rel = recursive_relation(h.type_table)
    st = PartitionState(h, opts)
    phase1_same_structure(h, rel, st)
    phase2_predecessor_closure(h, st)
    g = compute_properties(h, st, opts)
    mu = EmbeddingMap({oid: st.mu(oid) for oid in h.objects})
    return g, mu
