"""File formats and the inspection surfaces.

Writes the exprtree snapshot, its abstract graph (ahg-1), and a DGML
rendering into ./out, then shows the equivalent CLI invocations.  Run
`heapgraph serve out/exprtree.heapsnap --port 8077` afterwards to explore the
same data in the browser viewer.
"""

from pathlib import Path

from heapgraph import (StyleConfig, abstract_heap, build_fixture,
                       canonical_order, container_lengths, diagnose,
                       dump_snapshot, export_dgml, relabel, serialize)

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

heap = build_fixture("exprtree")
(out / "exprtree.heapsnap").write_bytes(dump_snapshot(heap))

graph, witness = abstract_heap(heap)
order = canonical_order(graph)
graph, witness = relabel(graph, order), witness.compose(order)
(out / "exprtree.ahg.json").write_bytes(serialize(graph))

metrics, findings = diagnose(heap, graph, witness)
dgml = export_dgml(graph, StyleConfig(heat=True), metrics,
                   container_lengths(heap, graph, witness), findings)
(out / "exprtree.dgml").write_text(dgml)

for name in ("exprtree.heapsnap", "exprtree.ahg.json", "exprtree.dgml"):
    print(f"wrote {out / name}")

print("""
equivalent CLI:
  heapgraph abstract out/exprtree.heapsnap -o out/exprtree.ahg.json \\
      --dgml out/exprtree.dgml --mu out/exprtree.mu.json
  heapgraph diagnose out/exprtree.heapsnap --report out/report.json
  heapgraph check out/exprtree.heapsnap out/exprtree.ahg.json out/exprtree.mu.json
  heapgraph serve out/exprtree.heapsnap --port 8077
""")
