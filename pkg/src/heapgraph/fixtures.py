"""Deterministic heap fixtures used by the test suites and demo scripts.

Every builder goes through parse_snapshot so fixtures are validated exactly
like externally supplied snapshots.
"""

from __future__ import annotations

import json

from .heap_model import ConcreteHeap, parse_snapshot

FIXTURES = ("exprtree", "list", "dlist", "btree", "facegrid", "octree-scene")


def build_fixture(name: str, **params) -> ConcreteHeap:
    """Build one of the named fixture heaps.

    exprtree               fixed 9-object expression tree with a shared-Var
                           environment array
    list(n)                singly linked list
    dlist(n)               doubly linked list
    btree(n)               complete binary tree, heap-ordered ids
    facegrid(faces)        faces each owning a 4-slot point array with unique
                           points (point_bytes tunes the point payload)
    octree-scene           space-decomposition tree plus a shape list sharing
                           face structures (depth/shapes/faces parameters)
    """
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown fixture {name!r}; expected one of {FIXTURES}") from None
    doc = builder(**params)
    return parse_snapshot(json.dumps(doc))


def _positive(value: int, what: str) -> int:
    if not isinstance(value, int) or value < 1:
        raise ValueError(f"{what} must be a positive integer, got {value!r}")
    return value


def _exprtree() -> dict:
    types = [
        {"id": 1, "name": "Expr", "kind": "object"},
        {"id": 2, "name": "Add", "kind": "object", "supertype": 1,
         "fields": [{"name": "l", "type": 1}, {"name": "r", "type": 1}]},
        {"id": 3, "name": "Sub", "kind": "object", "supertype": 1,
         "fields": [{"name": "l", "type": 1}, {"name": "r", "type": 1}]},
        {"id": 4, "name": "Mult", "kind": "object", "supertype": 1,
         "fields": [{"name": "l", "type": 1}, {"name": "r", "type": 1}]},
        {"id": 5, "name": "Const", "kind": "object", "supertype": 1},
        {"id": 6, "name": "Var", "kind": "object", "supertype": 1},
        {"id": 7, "name": "Var[]", "kind": "array", "elementType": 6},
    ]
    objects = [
        {"id": 1, "type": 2, "fields": {"l": 2, "r": 5}},
        {"id": 2, "type": 3, "fields": {"l": 4, "r": 3}},
        {"id": 3, "type": 5},
        {"id": 4, "type": 4, "fields": {"l": 7, "r": 6}},
        {"id": 5, "type": 4, "fields": {"l": 7, "r": 8}},
        {"id": 6, "type": 5},
        {"id": 7, "type": 6},
        {"id": 8, "type": 6},
        {"id": 9, "type": 7, "elements": [7, 8, 0]},
    ]
    return {"format": "heapsnap-1", "types": types, "objects": objects,
            "roots": {"exp": 1, "env": 9}}


def _list(n: int = 5) -> dict:
    _positive(n, "n")
    types = [{"id": 1, "name": "List", "kind": "object",
              "fields": [{"name": "next", "type": 1}]}]
    objects = [{"id": i, "type": 1, "fields": {"next": i + 1 if i < n else 0}}
               for i in range(1, n + 1)]
    return {"format": "heapsnap-1", "types": types, "objects": objects,
            "roots": {"head": 1}}


def _dlist(n: int = 5) -> dict:
    _positive(n, "n")
    types = [{"id": 1, "name": "DNode", "kind": "object",
              "fields": [{"name": "next", "type": 1}, {"name": "prev", "type": 1}]}]
    objects = [{"id": i, "type": 1,
                "fields": {"next": i + 1 if i < n else 0,
                           "prev": i - 1 if i > 1 else 0}}
               for i in range(1, n + 1)]
    return {"format": "heapsnap-1", "types": types, "objects": objects,
            "roots": {"head": 1}}


def _btree(n: int = 7) -> dict:
    _positive(n, "n")
    types = [{"id": 1, "name": "Node", "kind": "object",
              "fields": [{"name": "l", "type": 1}, {"name": "r", "type": 1}]}]
    objects = [{"id": i, "type": 1,
                "fields": {"l": 2 * i if 2 * i <= n else 0,
                           "r": 2 * i + 1 if 2 * i + 1 <= n else 0}}
               for i in range(1, n + 1)]
    return {"format": "heapsnap-1", "types": types, "objects": objects,
            "roots": {"root": 1}}


def _facegrid(faces: int = 180, point_bytes: int = 8) -> dict:
    _positive(faces, "faces")
    types = [
        {"id": 1, "name": "Face", "kind": "object",
         "fields": [{"name": "pts", "type": 2}]},
        {"id": 2, "name": "Point[]", "kind": "array", "elementType": 3},
        {"id": 3, "name": "Point", "kind": "object"},
        {"id": 4, "name": "Face[]", "kind": "array", "elementType": 1},
    ]
    objects = []
    # ids: faces 1..F, arrays F+1..2F, points 2F+1..6F, face array 6F+1
    for i in range(1, faces + 1):
        objects.append({"id": i, "type": 1, "bytes": 8, "fields": {"pts": faces + i}})
    for i in range(1, faces + 1):
        base = 2 * faces + 4 * (i - 1)
        objects.append({"id": faces + i, "type": 2, "bytes": 20,
                        "elements": [base + 1, base + 2, base + 3, base + 4]})
    for i in range(1, 4 * faces + 1):
        objects.append({"id": 2 * faces + i, "type": 3, "bytes": point_bytes})
    holder = 6 * faces + 1
    objects.append({"id": holder, "type": 4, "bytes": 4 + 4 * faces,
                    "elements": list(range(1, faces + 1))})
    return {"format": "heapsnap-1", "types": types, "objects": objects,
            "roots": {"faces": holder}}


def _octree_scene(depth: int = 3, shapes: int = 6, faces: int = 8) -> dict:
    _positive(depth, "depth")
    _positive(shapes, "shapes")
    _positive(faces, "faces")
    leafs = 4 ** (depth - 1)
    if faces > leafs:
        raise ValueError(f"faces ({faces}) cannot exceed leaf quadrants ({leafs})")
    types = [
        {"id": 1, "name": "Scene", "kind": "object",
         "fields": [{"name": "tree", "type": 2}, {"name": "objs", "type": 3}]},
        {"id": 2, "name": "Quad", "kind": "object",
         "fields": [{"name": "q0", "type": 2}, {"name": "q1", "type": 2},
                    {"name": "q2", "type": 2}, {"name": "q3", "type": 2},
                    {"name": "face", "type": 6}]},
        {"id": 3, "name": "ObjNode", "kind": "object",
         "fields": [{"name": "next", "type": 3}, {"name": "shape", "type": 4}]},
        {"id": 4, "name": "Shape", "kind": "object"},
        {"id": 5, "name": "Sphere", "kind": "object", "supertype": 4,
         "fields": [{"name": "mat", "type": 9}]},
        {"id": 6, "name": "Face", "kind": "object",
         "fields": [{"name": "pts", "type": 7}]},
        {"id": 7, "name": "Point[]", "kind": "array", "elementType": 8},
        {"id": 8, "name": "Point", "kind": "object"},
        {"id": 9, "name": "Material", "kind": "object"},
        {"id": 10, "name": "Triangle", "kind": "object", "supertype": 4,
         "fields": [{"name": "mat", "type": 9}, {"name": "face", "type": 6}]},
    ]

    objects = []
    next_id = 1
    def take() -> int:
        nonlocal next_id
        nid = next_id
        next_id += 1
        return nid

    scene = take()
    nquads = (4 ** depth - 1) // 3
    quads = [take() for _ in range(nquads)]
    objnodes = [take() for _ in range(shapes)]
    shape_objs = [take() for _ in range(shapes)]
    mats = [take(), take()]
    face_objs = [take() for _ in range(faces)]
    arrays = [take() for _ in range(faces)]
    points = [take() for _ in range(4 * faces)]

    objects.append({"id": scene, "type": 1,
                    "fields": {"tree": quads[0], "objs": objnodes[0]}})
    leaf_index = 0
    for pos in range(nquads):
        children = [4 * pos + 1 + j for j in range(4)]
        if children[0] < nquads:
            fields = {f"q{j}": quads[children[j]] for j in range(4)}
            fields["face"] = 0
        else:
            fields = {f"q{j}": 0 for j in range(4)}
            fields["face"] = face_objs[leaf_index % faces]
            leaf_index += 1
        objects.append({"id": quads[pos], "type": 2, "fields": fields})
    for i in range(shapes):
        objects.append({"id": objnodes[i], "type": 3,
                        "fields": {"next": objnodes[i + 1] if i + 1 < shapes else 0,
                                   "shape": shape_objs[i]}})
        if i % 2 == 0:
            objects.append({"id": shape_objs[i], "type": 5,
                            "fields": {"mat": mats[i % 2]}})
        else:
            objects.append({"id": shape_objs[i], "type": 10,
                            "fields": {"mat": mats[i % 2],
                                       "face": face_objs[i % faces]}})
    for m in mats:
        objects.append({"id": m, "type": 9})
    for i in range(faces):
        objects.append({"id": face_objs[i], "type": 6, "fields": {"pts": arrays[i]}})
        objects.append({"id": arrays[i], "type": 7,
                        "elements": points[4 * i:4 * i + 4]})
    for p in points:
        objects.append({"id": p, "type": 8})

    return {"format": "heapsnap-1", "types": types, "objects": objects,
            "roots": {"scene": scene}}


_BUILDERS = {
    "exprtree": _exprtree,
    "list": _list,
    "dlist": _dlist,
    "btree": _btree,
    "facegrid": _facegrid,
    "octree-scene": _octree_scene,
}
