"""Per-node memory metrics, bloat detectors, and the snapshot backoff policy.

Detectors flag abstract nodes whose represented objects show common memory
problems: header overhead dominating payload, undersized or mostly-null
containers, and regions of small objects uniquely owned through one injective
edge (candidates for flattening into their owner).
"""

from __future__ import annotations

from dataclasses import dataclass

from .abstract_graph import AbstractGraph, EmbeddingMap
from .heap_model import NULL_ID, ConcreteHeap

HOT5 = "hot5"
HOT15 = "hot15"
HOT25 = "hot25"
SMALL_OBJECTS = "smallObjects"
SMALL_CONTAINERS = "smallContainers"
SPARSE_CONTAINERS = "sparseContainers"
OVER_FACTORED = "overFactored"

HEADER_BYTES = 4


@dataclass(frozen=True)
class NodeMetrics:
    node: int
    object_count: int
    total_bytes: int
    overhead_bytes: int
    data_bytes: int
    heap_fraction: float

    def to_json(self) -> dict:
        return {"node": self.node, "objectCount": self.object_count,
                "totalBytes": self.total_bytes, "overheadBytes": self.overhead_bytes,
                "dataBytes": self.data_bytes, "heapFraction": self.heap_fraction}


@dataclass(frozen=True)
class Finding:
    kind: str
    node: int
    evidence: dict

    def to_json(self) -> dict:
        return {"kind": self.kind, "node": self.node, "evidence": self.evidence}


def compute_metrics(h: ConcreteHeap, g: AbstractGraph, mu: EmbeddingMap,
                    header_bytes: int = HEADER_BYTES) -> list[NodeMetrics]:
    """Byte totals and heap fractions per content node, via the witness map."""
    inverse = mu.inverse()
    total_heap = h.total_bytes()
    metrics = []
    for nid in g.content_ids():
        members = inverse.get(nid, [])
        total = sum(h.size_of(oid) for oid in members)
        overhead = header_bytes * len(members)
        fraction = total / total_heap if total_heap else 0.0
        metrics.append(NodeMetrics(nid, len(members), total, overhead,
                                   total - overhead, fraction))
    return metrics


def heat_bucket(m: NodeMetrics) -> str | None:
    if m.heap_fraction > 0.25:
        return HOT25
    if m.heap_fraction > 0.15:
        return HOT15
    if m.heap_fraction > 0.05:
        return HOT5
    return None


def detect_heat(metrics: list[NodeMetrics]) -> list[Finding]:
    out = []
    for m in metrics:
        bucket = heat_bucket(m)
        if bucket and m.total_bytes > 0:
            out.append(Finding(bucket, m.node, {"fraction": round(m.heap_fraction, 4)}))
    return out


def _is_small(m: NodeMetrics) -> bool:
    # overhead > data/2, kept in integers
    return m.object_count > 0 and 2 * m.overhead_bytes > m.data_bytes


def detect_small_objects(metrics: list[NodeMetrics]) -> list[Finding]:
    """Nodes where per-object header overhead exceeds half the stored data."""
    return [Finding(SMALL_OBJECTS, m.node,
                    {"overheadBytes": m.overhead_bytes, "dataBytes": m.data_bytes})
            for m in metrics if _is_small(m)]


def detect_container_issues(h: ConcreteHeap, g: AbstractGraph,
                            mu: EmbeddingMap) -> list[Finding]:
    """Container nodes whose members are all tiny, or all mostly null."""
    inverse = mu.inverse()
    tt = h.type_table
    out = []
    for nid in g.content_ids():
        members = inverse.get(nid, [])
        if not members:
            continue
        if not all(tt.decl(h.objects[oid].type).is_container for oid in members):
            continue
        filled = []
        sparse = []
        for oid in members:
            elements = h.objects[oid].elements
            nulls = sum(1 for t in elements if t == NULL_ID)
            filled.append(len(elements) - nulls)
            sparse.append(2 * nulls > len(elements) if elements else False)
        if all(n <= 3 for n in filled):
            out.append(Finding(SMALL_CONTAINERS, nid, {"maxElements": max(filled)}))
        if all(sparse):
            out.append(Finding(SPARSE_CONTAINERS, nid,
                               {"containers": len(members)}))
    return out


def detect_overfactored(g: AbstractGraph, metrics: list[NodeMetrics]) -> list[Finding]:
    """Small-object nodes owned through exactly one injective incoming edge."""
    out = []
    for m in metrics:
        if not _is_small(m):
            continue
        incoming = [e for e in g.in_edges(m.node) if e.src != g.root]
        if len(incoming) == 1 and incoming[0].injective:
            e = incoming[0]
            out.append(Finding(OVER_FACTORED, m.node,
                               {"incomingEdge": [e.src, e.label],
                                "overheadBytes": m.overhead_bytes,
                                "dataBytes": m.data_bytes}))
    return out


def diagnose(h: ConcreteHeap, g: AbstractGraph,
             mu: EmbeddingMap) -> tuple[list[NodeMetrics], list[Finding]]:
    """All detectors at once, in a deterministic order."""
    metrics = compute_metrics(h, g, mu)
    findings = (detect_heat(metrics) + detect_small_objects(metrics)
                + detect_container_issues(h, g, mu)
                + detect_overfactored(g, metrics))
    findings.sort(key=lambda f: (f.node, f.kind))
    return metrics, findings


def container_lengths(h: ConcreteHeap, g: AbstractGraph,
                      mu: EmbeddingMap) -> dict[int, int]:
    """Nodes whose members are containers sharing one slot count -> that count."""
    inverse = mu.inverse()
    tt = h.type_table
    out: dict[int, int] = {}
    for nid in g.content_ids():
        members = inverse.get(nid, [])
        if not members:
            continue
        if not all(tt.decl(h.objects[oid].type).is_container for oid in members):
            continue
        lengths = {len(h.objects[oid].elements) for oid in members}
        if len(lengths) == 1:
            out[nid] = lengths.pop()
    return out


# --- snapshot sampling policy ------------------------------------------------


@dataclass(frozen=True)
class SamplerState:
    """Exponential-backoff sampler keyed on reachable heap size."""

    threshold: int
    active: bool = False
    snapshots_taken: int = 0

    def __post_init__(self):
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")


SKIP = "skip"
SNAPSHOT = "snapshot"


def backoff_step(st: SamplerState, reachable_bytes: int) -> tuple[SamplerState, str]:
    """Snapshot when the reachable size moved by 1.5x in either direction.

    Integer-safe: grow when 2*size >= 3*threshold, shrink when 3*size <=
    2*threshold.  The threshold follows every snapshot.
    """
    if reachable_bytes < 0:
        raise ValueError("reachable_bytes must be >= 0")
    grow = 2 * reachable_bytes >= 3 * st.threshold
    shrink = 3 * reachable_bytes <= 2 * st.threshold
    if grow or shrink:
        return (SamplerState(max(reachable_bytes, 1), True,
                             st.snapshots_taken + 1), SNAPSHOT)
    return st, SKIP
