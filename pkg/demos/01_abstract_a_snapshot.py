"""Walk through the core pipeline: snapshot -> abstract heap graph.

The expression-tree fixture has nine objects; the abstraction folds them into
four nodes while keeping the facts a reader cares about: the interior of the
tree is a genuine tree over {l, r}, several expression nodes share Var leaves
(the non-injective edge), and the environment array may hold nulls.
"""

from heapgraph import abstract_heap, build_fixture, check_embedding

heap = build_fixture("exprtree")
print(f"concrete heap: {len(heap.objects)} objects, {len(heap.pointers)} pointers")

graph, witness = abstract_heap(heap)

print("\npartition (node -> concrete members):")
for node, members in sorted(witness.inverse().items()):
    kinds = sorted(graph.node(node).types)
    print(f"  n{node} -> {members}  types={kinds}  card={graph.node(node).card}")

print("\nedges (wide/orange in a viewer = not injective):")
for e in graph.edges:
    marker = "   " if e.injective else "!! "
    print(f"  {marker}{e.src} -{e.label}-> {e.tgt}")

print("\nshape facts:")
for s in graph.shapes:
    print(f"  node {s.node}: {s.shape}{{{', '.join(sorted(s.labels))}}}")

report = check_embedding(heap, graph, witness)
print(f"\nmembership check (the heap is an instance of its own abstraction): "
      f"{'pass' if report.ok else report.failures}")
