"""Concrete heap model: snapshot parsing, pointer queries, and property oracles.

A concrete heap is a labeled directed graph over runtime objects.  Pointer
labels are field names (str), variable names (str, for pointers out of the
root), or element indices (int, for array/container slots).  Object id 0 is
reserved for null; the root is implicit in snapshots and identified here by
the ROOT_ID sentinel.  The oracles in this module are deliberately brute
force: they are the ground truth that the abstraction layers are tested
against.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

NULL_ID = 0
ROOT_ID = -1

TREE = "tree"
ANY = "any"

KINDS = ("object", "array", "container", "opaque")

SNAPSHOT_FORMAT = "heapsnap-1"

# Reserved by the abstract layer to stand for "any element index".
RESERVED_LABEL = "[]"

Label = str | int
Pointer = tuple[int, Label, int]

# A region is a set of heap object ids; null and root are never members.
Region = frozenset[int]


class SnapshotError(ValueError):
    """Malformed or inconsistent snapshot data, with a document location."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location
        self.message = message


@dataclass(frozen=True)
class TypeDecl:
    """One declared type: object/opaque with named fields, or array/container."""

    id: int
    name: str
    kind: str
    supertype: int | None = None
    fields: tuple[tuple[str, int], ...] = ()
    element_type: int | None = None

    @property
    def is_container(self) -> bool:
        return self.kind in ("array", "container")


class TypeTable:
    """Validated, closed set of type declarations with lookup helpers."""

    def __init__(self, declarations: Iterable[TypeDecl]):
        decls = tuple(declarations)
        by_id: dict[int, TypeDecl] = {}
        for i, d in enumerate(decls):
            loc = f"types[{i}]"
            if d.id <= 0:
                raise SnapshotError(loc, f"type id must be positive, got {d.id}")
            if d.id in by_id:
                raise SnapshotError(loc, f"duplicate type id {d.id}")
            if d.kind not in KINDS:
                raise SnapshotError(loc, f"unknown kind {d.kind!r}")
            by_id[d.id] = d
        for i, d in enumerate(decls):
            loc = f"types[{i}]"
            if d.supertype is not None and d.supertype not in by_id:
                raise SnapshotError(loc, f"supertype {d.supertype} not declared")
            if d.is_container:
                if d.fields:
                    raise SnapshotError(loc, f"kind {d.kind} cannot declare named fields")
                if d.element_type is None:
                    raise SnapshotError(loc, f"kind {d.kind} requires elementType")
                if d.element_type not in by_id:
                    raise SnapshotError(loc, f"elementType {d.element_type} not declared")
            else:
                if d.element_type is not None:
                    raise SnapshotError(loc, f"kind {d.kind} cannot have elementType")
                seen = set()
                for name, tid in d.fields:
                    if name == RESERVED_LABEL:
                        raise SnapshotError(loc, f"field name {RESERVED_LABEL!r} is reserved")
                    if name in seen:
                        raise SnapshotError(loc, f"duplicate field {name!r}")
                    seen.add(name)
                    if tid not in by_id:
                        raise SnapshotError(loc, f"field {name!r} references unknown type {tid}")
        self._by_id = by_id
        self._check_supertype_acyclic(decls)

    def _check_supertype_acyclic(self, decls: tuple[TypeDecl, ...]) -> None:
        for d in decls:
            seen = {d.id}
            cur = d.supertype
            while cur is not None:
                if cur in seen:
                    raise SnapshotError(f"type {d.id}", "supertype chain is cyclic")
                seen.add(cur)
                cur = self._by_id[cur].supertype

    def __contains__(self, type_id: int) -> bool:
        return type_id in self._by_id

    def __iter__(self) -> Iterator[TypeDecl]:
        return iter(self._by_id.values())

    def __len__(self) -> int:
        return len(self._by_id)

    def decl(self, type_id: int) -> TypeDecl:
        return self._by_id[type_id]

    def name(self, type_id: int) -> str:
        return self._by_id[type_id].name

    @cached_property
    def ids_by_name(self) -> dict[str, tuple[int, ...]]:
        out: dict[str, list[int]] = {}
        for d in self._by_id.values():
            out.setdefault(d.name, []).append(d.id)
        return {k: tuple(v) for k, v in out.items()}

    def declared_labels(self, type_id: int) -> frozenset[str]:
        """Field labels of a type including inherited ones."""
        cached = self._label_cache.get(type_id)
        if cached is not None:
            return cached
        d = self._by_id[type_id]
        labels = set(name for name, _ in d.fields)
        if d.supertype is not None:
            labels |= self.declared_labels(d.supertype)
        result = frozenset(labels)
        self._label_cache[type_id] = result
        return result

    @cached_property
    def _label_cache(self) -> dict[int, frozenset[str]]:
        return {}

    def subtypes(self) -> dict[int, tuple[int, ...]]:
        """Map supertype id -> declared direct subtype ids."""
        out: dict[int, list[int]] = {}
        for d in self._by_id.values():
            if d.supertype is not None:
                out.setdefault(d.supertype, []).append(d.id)
        return {k: tuple(sorted(v)) for k, v in out.items()}


@dataclass(frozen=True)
class ConcreteObject:
    """One heap object; field targets and element slots point at object ids (0 = null)."""

    id: int
    type: int
    bytes: int | None = None
    fields: tuple[tuple[str, int], ...] = ()
    elements: tuple[int, ...] = ()

    def pointers(self) -> Iterator[tuple[Label, int]]:
        for name, tgt in self.fields:
            yield name, tgt
        for idx, tgt in enumerate(self.elements):
            yield idx, tgt


class ConcreteHeap:
    """Immutable snapshot: type table, objects, and named roots."""

    def __init__(self, type_table: TypeTable, objects: Iterable[ConcreteObject],
                 roots: dict[str, int]):
        self.type_table = type_table
        self.objects: dict[int, ConcreteObject] = {}
        for obj in objects:
            self.objects[obj.id] = obj
        self.roots = dict(roots)

    @cached_property
    def pointers(self) -> tuple[Pointer, ...]:
        """Every pointer in the heap, roots included (source ROOT_ID)."""
        out: list[Pointer] = []
        for obj in self.objects.values():
            for label, tgt in obj.pointers():
                out.append((obj.id, label, tgt))
        for name in sorted(self.roots):
            out.append((ROOT_ID, name, self.roots[name]))
        return tuple(out)

    def object_ids(self) -> frozenset[int]:
        return frozenset(self.objects)

    def type_of(self, object_id: int) -> TypeDecl:
        return self.type_table.decl(self.objects[object_id].type)

    def type_name(self, object_id: int) -> str:
        return self.type_of(object_id).name

    def size_of(self, object_id: int, header_bytes: int = 4, slot_bytes: int = 4) -> int:
        """Shallow size: explicit bytes, or header plus one slot per declared label/element."""
        obj = self.objects[object_id]
        if obj.bytes is not None:
            return obj.bytes
        decl = self.type_table.decl(obj.type)
        if decl.is_container:
            slots = len(obj.elements)
        else:
            slots = len(self.type_table.declared_labels(obj.type))
        return header_bytes + slot_bytes * slots

    def total_bytes(self, header_bytes: int = 4, slot_bytes: int = 4) -> int:
        return sum(self.size_of(oid, header_bytes, slot_bytes) for oid in self.objects)


@dataclass(frozen=True)
class RecursiveRelation:
    """Groups of mutually recursive types, as an equivalence over type ids.

    Two types are related iff they share a group whose type-reference graph
    contains a cycle (a self-loop counts).
    """

    group_of: dict[int, int]
    recursive_groups: frozenset[int]
    name_groups: dict[str, frozenset[int]] = field(default_factory=dict, repr=False)

    def related(self, t1: int, t2: int) -> bool:
        g = self.group_of.get(t1)
        return g is not None and g == self.group_of.get(t2) and g in self.recursive_groups

    def related_names(self, n1: str, n2: str) -> bool:
        """Name-level lifting, for callers holding type names rather than ids."""
        g1 = self.name_groups.get(n1, frozenset())
        g2 = self.name_groups.get(n2, frozenset())
        return bool(g1 & g2 & self.recursive_groups)

    def groups(self) -> dict[int, frozenset[int]]:
        out: dict[int, set[int]] = {}
        for tid, g in self.group_of.items():
            out.setdefault(g, set()).add(tid)
        return {g: frozenset(members) for g, members in out.items()}


def recursive_relation(tt: TypeTable) -> RecursiveRelation:
    """Partition types into strongly connected components of the reference graph.

    Edges: field and element declared types, plus supertype -> subtype.
    """
    succs: dict[int, set[int]] = {d.id: set() for d in tt}
    for d in tt:
        for _, ftype in d.fields:
            succs[d.id].add(ftype)
        if d.element_type is not None:
            succs[d.id].add(d.element_type)
        if d.supertype is not None:
            succs[d.supertype].add(d.id)

    # Iterative Tarjan SCC.
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    group_of: dict[int, int] = {}
    counter = 0
    next_group = 0
    for start in succs:
        if start in index:
            continue
        work: list[tuple[int, Iterator[int]]] = [(start, iter(sorted(succs[start])))]
        index[start] = low[start] = counter
        counter += 1
        stack.append(start)
        on_stack.add(start)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(sorted(succs[nxt]))))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    group_of[member] = next_group
                    if member == node:
                        break
                next_group += 1

    recursive = set()
    for d in tt:
        for nxt in succs[d.id]:
            if group_of[d.id] == group_of[nxt]:
                recursive.add(group_of[d.id])
    name_groups: dict[str, set[int]] = {}
    for d in tt:
        name_groups.setdefault(d.name, set()).add(group_of[d.id])
    return RecursiveRelation(group_of, frozenset(recursive),
                             {n: frozenset(g) for n, g in name_groups.items()})


def pointers_between(h: ConcreteHeap, c1: Iterable[int], c2: Iterable[int]) -> set[Pointer]:
    """All pointers crossing from region c1 into region c2."""
    src = set(c1)
    dst = set(c2)
    out: set[Pointer] = set()
    for oid in src:
        for label, tgt in h.objects[oid].pointers():
            if tgt in dst:
                out.add((oid, label, tgt))
    return out


def oracle_injective(h: ConcreteHeap, c1: Iterable[int], c2: Iterable[int],
                     p: Label) -> bool:
    """Pair-scan ground truth: distinct sources imply distinct targets for label p."""
    ptrs = [ptr for ptr in pointers_between(h, c1, c2) if ptr[1] == p]
    for i in range(len(ptrs)):
        for j in range(i + 1, len(ptrs)):
            if ptrs[i][0] != ptrs[j][0] and ptrs[i][2] == ptrs[j][2]:
                return False
    return True


def oracle_shape(h: ConcreteHeap, c: Iterable[int], labels: Iterable[Label]) -> str:
    """Ground-truth shape of the region's subgraph restricted to the given labels.

    TREE iff the subgraph is a forest: acyclic and no member has more than one
    incoming edge within the subgraph.  Anything else is ANY.
    """
    members = set(c)
    allowed = set(labels)
    indeg: dict[int, int] = {m: 0 for m in members}
    succs: dict[int, list[int]] = {m: [] for m in members}
    for oid in members:
        for label, tgt in h.objects[oid].pointers():
            if label in allowed and tgt in members:
                indeg[tgt] += 1
                if indeg[tgt] > 1:
                    return ANY
                succs[oid].append(tgt)
    # Kahn peeling; leftovers mean a cycle.
    queue = [m for m in members if indeg[m] == 0]
    seen = 0
    while queue:
        node = queue.pop()
        seen += 1
        for tgt in succs[node]:
            indeg[tgt] -= 1
            if indeg[tgt] == 0:
                queue.append(tgt)
    return TREE if seen == len(members) else ANY


# --- snapshot document handling -------------------------------------------

_TOP_KEYS = ("format", "types", "objects", "roots")


def _require(cond: bool, location: str, message: str) -> None:
    if not cond:
        raise SnapshotError(location, message)


def _opt_int(value, location: str, what: str) -> int | None:
    if value is None:
        return None
    _require(isinstance(value, int) and not isinstance(value, bool), location,
             f"{what} must be an integer")
    return value


def parse_snapshot(data: bytes | str) -> ConcreteHeap:
    """Parse and fully validate a heapsnap-1 JSON document."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SnapshotError("<document>", f"not valid UTF-8: {exc}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SnapshotError("<document>", f"not valid JSON: {exc}") from None
    _require(isinstance(doc, dict), "<document>", "top level must be an object")
    for key in doc:
        _require(key in _TOP_KEYS, key, "unknown top-level key")
    for key in _TOP_KEYS:
        _require(key in doc, "<document>", f"missing required key {key!r}")
    _require(doc["format"] == SNAPSHOT_FORMAT, "format",
             f"unknown format version {doc['format']!r}")

    _require(isinstance(doc["types"], list), "types", "must be a list")
    decls = []
    for i, td in enumerate(doc["types"]):
        loc = f"types[{i}]"
        _require(isinstance(td, dict), loc, "must be an object")
        for key in td:
            _require(key in ("id", "name", "kind", "supertype", "fields", "elementType"),
                     f"{loc}.{key}", "unknown key")
        _require(isinstance(td.get("id"), int), f"{loc}.id", "required integer")
        _require(isinstance(td.get("name"), str), f"{loc}.name", "required string")
        _require(isinstance(td.get("kind"), str), f"{loc}.kind", "required string")
        fields = []
        for j, fd in enumerate(td.get("fields", ())):
            floc = f"{loc}.fields[{j}]"
            _require(isinstance(fd, dict) and isinstance(fd.get("name"), str)
                     and isinstance(fd.get("type"), int), floc,
                     "must be {name: str, type: int}")
            fields.append((fd["name"], fd["type"]))
        decls.append(TypeDecl(
            id=td["id"], name=td["name"], kind=td["kind"],
            supertype=_opt_int(td.get("supertype"), f"{loc}.supertype", "supertype"),
            fields=tuple(fields),
            element_type=_opt_int(td.get("elementType"), f"{loc}.elementType", "elementType"),
        ))
    table = TypeTable(decls)

    _require(isinstance(doc["objects"], list), "objects", "must be a list")
    objects: list[ConcreteObject] = []
    ids: set[int] = set()
    for i, od in enumerate(doc["objects"]):
        loc = f"objects[{i}]"
        _require(isinstance(od, dict), loc, "must be an object")
        for key in od:
            _require(key in ("id", "type", "bytes", "fields", "elements"),
                     f"{loc}.{key}", "unknown key")
        oid = od.get("id")
        _require(isinstance(oid, int), f"{loc}.id", "required integer")
        _require(oid > 0, f"{loc}.id", "object id must be positive (0 is null)")
        _require(oid not in ids, f"{loc}.id", f"duplicate object id {oid}")
        ids.add(oid)
        tid = od.get("type")
        _require(isinstance(tid, int) and tid in table, f"{loc}.type",
                 f"unknown type id {tid}")
        decl = table.decl(tid)
        nbytes = _opt_int(od.get("bytes"), f"{loc}.bytes", "bytes")
        _require(nbytes is None or nbytes >= 0, f"{loc}.bytes", "bytes must be >= 0")
        fields = od.get("fields")
        elements = od.get("elements")
        if decl.is_container:
            _require(fields is None, f"{loc}.fields",
                     f"kind {decl.kind} objects carry elements, not fields")
        else:
            _require(elements is None, f"{loc}.elements",
                     f"kind {decl.kind} objects carry fields, not elements")
        fitems: list[tuple[str, int]] = []
        if fields is not None:
            _require(isinstance(fields, dict), f"{loc}.fields", "must be an object")
            declared = table.declared_labels(tid)
            for name, tgt in fields.items():
                _require(name in declared, f"{loc}.fields.{name}",
                         f"field {name!r} not declared on type {decl.name!r}")
                _require(isinstance(tgt, int), f"{loc}.fields.{name}", "target must be int")
                fitems.append((name, tgt))
        eitems: list[int] = []
        if elements is not None:
            _require(isinstance(elements, list), f"{loc}.elements", "must be a list")
            for j, tgt in enumerate(elements):
                _require(isinstance(tgt, int), f"{loc}.elements[{j}]", "target must be int")
                eitems.append(tgt)
        objects.append(ConcreteObject(id=oid, type=tid, bytes=nbytes,
                                      fields=tuple(fitems), elements=tuple(eitems)))

    # Targets can only be checked once all ids are known.
    for i, obj in enumerate(objects):
        for label, tgt in obj.pointers():
            if tgt != NULL_ID and tgt not in ids:
                raise SnapshotError(f"objects[{i}].{label}",
                                    f"dangling reference to object {tgt}")

    _require(isinstance(doc["roots"], dict), "roots", "must be an object")
    roots: dict[str, int] = {}
    for name, tgt in doc["roots"].items():
        loc = f"roots.{name}"
        _require(name != RESERVED_LABEL, loc, f"variable name {RESERVED_LABEL!r} is reserved")
        _require(isinstance(tgt, int), loc, "target must be int")
        _require(tgt == NULL_ID or tgt in ids, loc, f"dangling reference to object {tgt}")
        roots[name] = tgt

    return ConcreteHeap(table, objects, roots)


def snapshot_document(h: ConcreteHeap) -> dict:
    """Inverse of parse_snapshot: a JSON-serializable heapsnap-1 document."""
    types = []
    for d in sorted(h.type_table, key=lambda d: d.id):
        td: dict = {"id": d.id, "name": d.name, "kind": d.kind}
        if d.supertype is not None:
            td["supertype"] = d.supertype
        if d.fields:
            td["fields"] = [{"name": n, "type": t} for n, t in d.fields]
        if d.element_type is not None:
            td["elementType"] = d.element_type
        types.append(td)
    objects = []
    for obj in sorted(h.objects.values(), key=lambda o: o.id):
        od: dict = {"id": obj.id, "type": obj.type}
        if obj.bytes is not None:
            od["bytes"] = obj.bytes
        if obj.fields:
            od["fields"] = {n: t for n, t in obj.fields}
        if h.type_table.decl(obj.type).is_container:
            od["elements"] = list(obj.elements)
        objects.append(od)
    return {"format": SNAPSHOT_FORMAT, "types": types, "objects": objects,
            "roots": dict(sorted(h.roots.items()))}


def dump_snapshot(h: ConcreteHeap) -> bytes:
    return (json.dumps(snapshot_document(h), separators=(",", ":"), sort_keys=False)
            + "\n").encode("utf-8")
