"""heapgraph: abstract heap graphs for snapshot understanding and profiling.

Pipeline: parse a heapsnap-1 snapshot, abstract it into a small graph whose
nodes summarize regions (with type sets, cardinality intervals, per-edge
injectivity, and shape facts), then compare/merge graphs, collapse them
around variable roots for high-level views, and run memory-bloat detectors.
"""

from .abstract_graph import (AbstractEdge, AbstractGraph, AbstractNode,
                             ELEMENT_LABEL, EmbeddingDomainError, EmbeddingMap,
                             EmbeddingReport, Interval, SchemaError, ShapeFact,
                             Violation, abstract_label_of, canonical_order,
                             canonicalize, check_embedding, concretizes,
                             deserialize, graph_document, graphs_equal,
                             relabel, serialize)
from .abstraction import (AbstractionOptions, PartitionState, abstract_heap,
                          compute_properties, compute_shape,
                          phase1_same_structure, phase2_predecessor_closure)
from .algebra import (AmbiguousGraphError, CompareResult, Diff, IsomorphismMap,
                      JOIN, MergeResult, WIDEN, compare, merge)
from .diagnostics import (Finding, NodeMetrics, SamplerState, backoff_step,
                          compute_metrics, container_lengths,
                          detect_container_issues, detect_heat,
                          detect_overfactored, detect_small_objects, diagnose,
                          heat_bucket)
from .dgml import StyleConfig, export_dgml
from .fixtures import build_fixture
from .heap_model import (ANY, ConcreteHeap, ConcreteObject, Label, NULL_ID,
                         ROOT_ID, RecursiveRelation, Region, SnapshotError,
                         TREE, TypeDecl, TypeTable, dump_snapshot,
                         oracle_injective, oracle_shape, parse_snapshot,
                         pointers_between, recursive_relation,
                         snapshot_document)
from .reduction import Expansion, ReducedGraph, ReducedNode, expand, reduce, zoom

__version__ = "0.1.0"
