"""Shared test utilities: randomized heap generators built on the snapshot
parser so every generated heap is validated."""

from __future__ import annotations

import json
import random

from heapgraph import ConcreteHeap, parse_snapshot

VAR_NAMES = ("a", "b", "c", "x", "y")


def random_heap(rng: random.Random, max_objects: int = 50,
                max_types: int = 8) -> ConcreteHeap:
    """Arbitrary valid heap: subtyping, arrays, cycles, nulls, unreachables."""
    ntypes = rng.randint(1, max_types)
    kinds = {}
    types = []
    for tid in range(1, ntypes + 1):
        kind = rng.choice(("object", "object", "object", "array", "container",
                           "opaque"))
        kinds[tid] = kind
        td = {"id": tid, "name": f"T{tid}", "kind": kind}
        if kind in ("array", "container"):
            td["elementType"] = rng.randint(1, ntypes)
        else:
            object_supers = [s for s in range(1, tid)
                             if kinds[s] in ("object", "opaque")]
            if object_supers and rng.random() < 0.3:
                td["supertype"] = rng.choice(object_supers)
            td["fields"] = [{"name": f"f{i}", "type": rng.randint(1, ntypes)}
                            for i in range(rng.randint(0, 3))]
        types.append(td)

    nobjects = rng.randint(0, max_objects)
    ids = list(range(1, nobjects + 1))

    def target() -> int:
        if not ids or rng.random() < 0.25:
            return 0
        return rng.choice(ids)

    table = {td["id"]: td for td in types}

    def declared_fields(tid: int) -> list[str]:
        out = []
        cur = table[tid]
        while True:
            out.extend(f["name"] for f in cur.get("fields", ()))
            if "supertype" not in cur:
                return out
            cur = table[cur["supertype"]]

    objects = []
    for oid in ids:
        tid = rng.randint(1, ntypes)
        od = {"id": oid, "type": tid}
        if rng.random() < 0.4:
            od["bytes"] = rng.randint(0, 64)
        if kinds[tid] in ("array", "container"):
            od["elements"] = [target() for _ in range(rng.randint(0, 6))]
        else:
            od["fields"] = {name: target() for name in declared_fields(tid)
                            if rng.random() < 0.8}
        objects.append(od)

    roots = {name: target() for name in rng.sample(VAR_NAMES, rng.randint(0, 3))}
    doc = {"format": "heapsnap-1", "types": types, "objects": objects,
           "roots": roots}
    return parse_snapshot(json.dumps(doc))


def clone_with_offset(h: ConcreteHeap, offset: int = 1000) -> ConcreteHeap:
    """Same heap, object ids shifted; abstraction-isomorphic to the input."""
    from heapgraph import snapshot_document

    doc = snapshot_document(h)
    shift = lambda t: t + offset if t else 0
    for od in doc["objects"]:
        od["id"] += offset
        if "fields" in od:
            od["fields"] = {k: shift(v) for k, v in od["fields"].items()}
        if "elements" in od:
            od["elements"] = [shift(v) for v in od["elements"]]
    doc["roots"] = {k: shift(v) for k, v in doc["roots"].items()}
    return parse_snapshot(json.dumps(doc))


def family_pair(rng: random.Random):
    """Two heaps from one fixture family with different size parameters.

    Same-family pairs alias their variables and fields identically, which is
    the regime where the approximate order is exact after a merge.
    """
    from heapgraph import build_fixture

    family = rng.choice(("list", "dlist", "btree", "facegrid", "exprtree",
                         "octree-scene"))
    if family == "exprtree":
        return build_fixture(family), build_fixture(family)
    if family == "facegrid":
        return (build_fixture(family, faces=rng.randint(1, 12)),
                build_fixture(family, faces=rng.randint(1, 12)))
    if family == "octree-scene":
        return (build_fixture(family, depth=rng.randint(2, 3),
                              shapes=rng.randint(1, 8), faces=rng.randint(1, 4)),
                build_fixture(family, depth=rng.randint(2, 3),
                              shapes=rng.randint(1, 8), faces=rng.randint(1, 4)))
    return (build_fixture(family, n=rng.randint(1, 40)),
            build_fixture(family, n=rng.randint(1, 40)))


def tame_heap_pair(rng: random.Random, max_objects: int = 30
                   ) -> tuple[ConcreteHeap, ConcreteHeap]:
    """Two heaps over one shared type table, with type-conformant targets and
    recursion through self-referencing types only.  Abstractions of such heaps
    keep singleton type sets per node, which makes merge preimages per-graph
    singletons and the compare-after-merge property exact."""
    ntypes = rng.randint(1, 6)
    kinds = {tid: rng.choice(("object", "object", "object", "array"))
             for tid in range(1, ntypes + 1)}
    types = []
    for tid in range(1, ntypes + 1):
        td = {"id": tid, "name": f"T{tid}", "kind": kinds[tid]}
        if kinds[tid] == "array":
            # self or a forward object type, so cycles are self-loops only
            forward_objects = [t for t in range(tid, ntypes + 1)
                               if kinds[t] == "object"]
            td["elementType"] = rng.choice(forward_objects or [tid])
        else:
            td["fields"] = [{"name": f"f{i}", "type": rng.randint(tid, ntypes)}
                            for i in range(rng.randint(0, 2))]
        types.append(td)
    table = {td["id"]: td for td in types}

    def build_one() -> dict:
        nobjects = rng.randint(1, max_objects)
        by_type: dict[int, list[int]] = {tid: [] for tid in range(1, ntypes + 1)}
        chosen = []
        for oid in range(1, nobjects + 1):
            tid = rng.randint(1, ntypes)
            chosen.append((oid, tid))
            by_type[tid].append(oid)

        def conformant(tid: int) -> int:
            pool = by_type[tid]
            if not pool or rng.random() < 0.3:
                return 0
            return rng.choice(pool)

        objects = []
        for oid, tid in chosen:
            od = {"id": oid, "type": tid}
            if kinds[tid] == "array":
                etype = table[tid]["elementType"]
                od["elements"] = [conformant(etype)
                                  for _ in range(rng.randint(0, 4))]
            else:
                od["fields"] = {f["name"]: conformant(f["type"])
                                for f in table[tid].get("fields", ())
                                if rng.random() < 0.9}
            objects.append(od)
        # One dedicated type pool per variable name.  Aliased variables (two
        # names reaching one region in only one of the heaps) are the known
        # blind spot of the approximate order, so the property harness stays
        # on pairs where the compare-after-merge inclusion is exact.
        roots = {}
        for i in range(rng.randint(1, min(3, ntypes))):
            name, tid = VAR_NAMES[i], i + 1
            roots[name] = rng.choice(by_type[tid]) if by_type[tid] else 0
        return {"format": "heapsnap-1", "types": types, "objects": objects,
                "roots": roots}

    return (parse_snapshot(json.dumps(build_one())),
            parse_snapshot(json.dumps(build_one())))
