"""Compare and merge abstract graphs from different program moments.

Two snapshots of the same list structure at different sizes merge into one
summary whose cardinality covers both; a widened merge jumps the upper bound
to infinity once it starts growing, which is what lets a chain of merges
settle instead of tracking every length ever seen.
"""

from heapgraph import (JOIN, WIDEN, abstract_heap, build_fixture, compare,
                       graphs_equal, merge)

g2, _ = abstract_heap(build_fixture("list", n=2))
g5, _ = abstract_heap(build_fixture("list", n=5))

joined = merge(g2, g5, JOIN)
summary = next(n for n in joined.graph.nodes.values() if n.types)
print(f"join of list(2) and list(5): card={summary.card}, "
      f"types={sorted(summary.types)}")

print(f"both inputs are covered: "
      f"{compare(g2, joined.graph).leq and compare(g5, joined.graph).leq}")

widened = merge(g2, g5, WIDEN)
summary = next(n for n in widened.graph.nodes.values() if n.types)
print(f"widened merge: card={summary.card}")

acc = abstract_heap(build_fixture("list", n=2))[0]
for n in (3, 5, 8, 13):
    nxt = merge(acc, abstract_heap(build_fixture("list", n=n))[0], WIDEN).graph
    stable = graphs_equal(nxt, acc)
    print(f"  after folding list({n}): fixpoint={stable}")
    if stable:
        break
    acc = nxt

result = compare(g5, g2)
print("\nwhy list(5) does not fit under list(2):")
for diff in result.diffs:
    print(f"  {diff.kind}: {diff.subject}")
