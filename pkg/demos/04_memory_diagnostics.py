"""Memory-bloat detectors over the face-grid scenario.

The pattern: thousands of tiny Point objects uniquely owned through an array,
per face.  The over-factored detector singles out exactly that shape; the
heat map shows where the bytes live; the sampler decides when snapshots are
worth taking as the reachable heap ramps and decays.
"""

from heapgraph import (SamplerState, abstract_heap, backoff_step,
                       build_fixture, diagnose)

heap = build_fixture("facegrid", faces=180)
graph, witness = abstract_heap(heap)
metrics, findings = diagnose(heap, graph, witness)

print("per-node memory:")
for m in metrics:
    types = ", ".join(sorted(graph.node(m.node).types))
    print(f"  n{m.node:<4} {types:<12} {m.total_bytes:>7}B "
          f"({m.heap_fraction:.1%} of heap, {m.object_count} objects)")

print("\nfindings:")
for f in findings:
    types = ", ".join(sorted(graph.node(f.node).types))
    print(f"  {f.kind:<18} n{f.node} ({types}) {f.evidence}")

print("\nsampler on a ramp-and-decay trace:")
trace = [100, 211, 447, 945, 2000, 930, 432, 200]
state = SamplerState(threshold=trace[0])
for size in trace:
    state, decision = backoff_step(state, size)
    print(f"  reachable={size:>5} -> {decision:<8} threshold={state.threshold}")
print(f"snapshots taken: {state.snapshots_taken}")
