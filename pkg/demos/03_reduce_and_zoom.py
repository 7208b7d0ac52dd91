"""Semantic zoom: reduced overview, node expansion, and object pinning.

The octree scene is big enough that even the abstract graph benefits from a
dominator-collapsed overview.  Expanding a reduced node recovers its interior;
pinning individual objects re-runs the abstraction so those objects surface
as their own nodes without losing the surrounding summary.
"""

from heapgraph import abstract_heap, build_fixture, expand, reduce, zoom

heap = build_fixture("octree-scene")
graph, _ = abstract_heap(heap)
print(f"abstract graph: {len(graph.content_ids())} nodes")

reduced = reduce(graph)
groups = [rn for rid, rn in sorted(reduced.nodes.items()) if rid > 0]
print(f"reduced overview: {len(groups)} groups")
for rn in groups:
    star = "*" if rn.interesting else " "
    print(f"  {star} r{rn.id}: {sorted(rn.types)} covering {sorted(rn.covered)}")

face_group = next(rn for rn in groups if "Point" in rn.types)
view = expand(reduced, face_group.id)
print(f"\nexpanding r{face_group.id}: nodes {view.nodes}")
for e in view.internal_edges:
    print(f"  internal {e.src} -{e.label}-> {e.tgt}")

# pin two Point objects: they become their own [1,1] nodes
points = [oid for oid in sorted(heap.objects) if heap.type_name(oid) == "Point"][:2]
zoomed, witness = zoom(heap, points)
print(f"\nafter pinning {points}: {len(zoomed.content_ids())} nodes")
for oid in points:
    node = zoomed.node(witness.to_node[oid])
    print(f"  object {oid} -> node {node.id} card={node.card}")
