"""Read-only HTTP API over loaded snapshots, backing the browser viewer.

Every snapshot is keyed by its content hash; all derived artifacts (canonical
abstract graph, witness map, reduced view, diagnostics) are computed at
registration time and never mutated, so concurrent readers always see
consistent data.  Zoom recomputations are cached by request body hash.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .abstract_graph import (AbstractGraph, EmbeddingMap, canonical_order,
                             graph_document, relabel)
from .abstraction import abstract_heap
from .diagnostics import Finding, NodeMetrics, container_lengths, diagnose
from .heap_model import ConcreteHeap, parse_snapshot
from .reduction import ReducedGraph, expand
from .reduction import reduce as reduce_graph
from .reduction import zoom

MAX_ZOOM_IDS = 64


@dataclass(frozen=True)
class Artifacts:
    data: bytes
    heap: ConcreteHeap
    graph: AbstractGraph
    mu: EmbeddingMap
    reduced: ReducedGraph
    metrics: list[NodeMetrics]
    findings: list[Finding]
    lengths: dict[int, int]


def _build_artifacts(data: bytes) -> Artifacts:
    heap = parse_snapshot(data)
    g, mu = abstract_heap(heap)
    order = canonical_order(g)
    cg, cmu = relabel(g, order), mu.compose(order)
    metrics, findings = diagnose(heap, cg, cmu)
    return Artifacts(data, heap, cg, cmu, reduce_graph(cg, metrics), metrics,
                     findings, container_lengths(heap, cg, cmu))


class SessionStore:
    """Registry of immutable snapshot artifacts keyed by content hash."""

    def __init__(self, static_dir: Path | None = None):
        self._entries: dict[str, Artifacts] = {}
        self._zoom_cache: dict[tuple[str, str], bytes] = {}
        self._lock = threading.Lock()
        self.static_dir = static_dir

    def register(self, data: bytes) -> str:
        digest = hashlib.sha256(data).hexdigest()
        with self._lock:
            if digest in self._entries:
                return digest
        artifacts = _build_artifacts(data)
        with self._lock:
            self._entries.setdefault(digest, artifacts)
        return digest

    def get(self, digest: str) -> Artifacts | None:
        with self._lock:
            return self._entries.get(digest)

    def hashes(self) -> list[str]:
        with self._lock:
            return sorted(self._entries)

    def zoom_cached(self, digest: str, body: bytes) -> bytes | None:
        with self._lock:
            return self._zoom_cache.get((digest, hashlib.sha256(body).hexdigest()))

    def zoom_store(self, digest: str, body: bytes, response: bytes) -> None:
        with self._lock:
            self._zoom_cache[(digest, hashlib.sha256(body).hexdigest())] = response


def _reduced_json(r: ReducedGraph) -> dict:
    return {
        "nodes": [{"id": rid, "covers": sorted(rn.covered),
                   "types": sorted(rn.types), "card": rn.card.to_json(),
                   "interesting": rn.interesting, "unreachable": rn.unreachable,
                   **({"bytes": rn.bytes} if rn.bytes is not None else {})}
                  for rid, rn in sorted(r.nodes.items())],
        "edges": [list(e) for e in r.edges],
        "vars": [list(v) for v in r.var_edges],
    }


def _graph_envelope(a: Artifacts, view: str) -> dict:
    out = {"graph": graph_document(a.graph),
           "lengths": {str(k): v for k, v in a.lengths.items()},
           "metrics": [m.to_json() for m in a.metrics],
           "findings": [f.to_json() for f in a.findings]}
    if view == "reduced":
        out["reduced"] = _reduced_json(a.reduced)
    return out


class ApiHandler(BaseHTTPRequestHandler):
    store: SessionStore  # assigned by run_server / make_server

    # quiet by default; tests and the CLI don't want per-request log lines
    def log_message(self, fmt, *args):
        pass

    def _send_json(self, payload, status: int = 200,
                   raw: bytes | None = None) -> bytes:
        body = raw if raw is not None else (
            json.dumps(payload, separators=(",", ":"), sort_keys=True) + "\n"
        ).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)
        return body

    def _error(self, status: int, message: str) -> None:
        self._send_json({"error": message}, status)

    def do_GET(self):
        path, _, query = self.path.partition("?")
        try:
            if path == "/api/snapshots":
                items = []
                for digest in self.store.hashes():
                    a = self.store.get(digest)
                    items.append({"hash": digest,
                                  "objectCount": len(a.heap.objects),
                                  "bytes": a.heap.total_bytes()})
                self._send_json(items)
                return
            m = re.fullmatch(r"/api/graph/([0-9a-f]+)", path)
            if m:
                a = self.store.get(m.group(1))
                if a is None:
                    self._error(404, "unknown snapshot hash")
                    return
                params = dict(p.split("=", 1) for p in query.split("&") if "=" in p)
                view = params.get("view", "abstract")
                if view not in ("abstract", "reduced"):
                    self._error(400, f"unknown view {view!r}")
                    return
                self._send_json(_graph_envelope(a, view))
                return
            m = re.fullmatch(r"/api/graph/([0-9a-f]+)/node/(-?\d+)", path)
            if m:
                a = self.store.get(m.group(1))
                if a is None:
                    self._error(404, "unknown snapshot hash")
                    return
                nid = int(m.group(2))
                if nid not in a.graph.nodes:
                    self._error(404, f"unknown node {nid}")
                    return
                node = a.graph.node(nid)
                members = a.mu.inverse().get(nid, [])
                metric = next((m for m in a.metrics if m.node == nid), None)
                self._send_json({
                    "id": nid, "types": sorted(node.types),
                    "card": node.card.to_json(),
                    "memberCount": len(members), "members": members,
                    "metrics": metric.to_json() if metric else None,
                })
                return
            m = re.fullmatch(r"/api/graph/([0-9a-f]+)/diagnostics", path)
            if m:
                a = self.store.get(m.group(1))
                if a is None:
                    self._error(404, "unknown snapshot hash")
                    return
                self._send_json({"metrics": [x.to_json() for x in a.metrics],
                                 "findings": [f.to_json() for f in a.findings]})
                return
            m = re.fullmatch(r"/api/graph/([0-9a-f]+)/expand/(-?\d+)", path)
            if m:
                a = self.store.get(m.group(1))
                if a is None:
                    self._error(404, "unknown snapshot hash")
                    return
                rid = int(m.group(2))
                if rid not in a.reduced.nodes:
                    self._error(404, f"unknown reduced node {rid}")
                    return
                view = expand(a.reduced, rid)
                self._send_json({
                    "nodes": list(view.nodes),
                    "internalEdges": [{"src": e.src, "label": e.label,
                                       "tgt": e.tgt, "inj": e.injective}
                                      for e in view.internal_edges],
                    "boundaryEdges": [{"src": e.src, "label": e.label,
                                       "tgt": e.tgt, "inj": e.injective}
                                      for e in view.boundary_edges],
                })
                return
            if self._serve_static(path):
                return
            self._error(404, "no such endpoint")
        except Exception as exc:  # pragma: no cover - last-resort guard
            self._error(500, f"internal error: {exc}")

    def do_POST(self):
        m = re.fullmatch(r"/api/graph/([0-9a-f]+)/zoom", self.path)
        if not m:
            self._error(404, "no such endpoint")
            return
        a = self.store.get(m.group(1))
        if a is None:
            self._error(404, "unknown snapshot hash")
            return
        length = int(self.headers.get("Content-Length", 0))
        body = self.rfile.read(length)
        cached = self.store.zoom_cached(m.group(1), body)
        if cached is not None:
            self._send_json(None, raw=cached)
            return
        try:
            doc = json.loads(body.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            self._error(400, "body must be JSON")
            return
        ids = doc.get("interesting") if isinstance(doc, dict) else None
        if not isinstance(ids, list) or not all(
                isinstance(i, int) and not isinstance(i, bool) for i in ids):
            self._error(400, 'body must be {"interesting": [objectIds]}')
            return
        if len(set(ids)) > MAX_ZOOM_IDS:
            self._error(400, f"at most {MAX_ZOOM_IDS} interesting ids per request")
            return
        unknown = set(ids) - a.heap.object_ids()
        if unknown:
            self._error(400, f"unknown object ids: {sorted(unknown)}")
            return
        try:
            g, mu = zoom(a.heap, ids)
            order = canonical_order(g)
            cg, cmu = relabel(g, order), mu.compose(order)
            from .diagnostics import compute_metrics
            payload = {"graph": graph_document(cg),
                       "lengths": {str(k): v
                                   for k, v in container_lengths(a.heap, cg, cmu).items()},
                       "metrics": [x.to_json()
                                   for x in compute_metrics(a.heap, cg, cmu)],
                       "interesting": sorted(set(ids)),
                       "pinnedNodes": {str(oid): cmu.to_node[oid] for oid in ids}}
        except Exception as exc:
            self._error(500, f"zoom recomputation failed: {exc}")
            return
        raw = self._send_json(payload)
        self.store.zoom_store(m.group(1), body, raw)

    def _serve_static(self, path: str) -> bool:
        if self.store.static_dir is None:
            return False
        rel = "index.html" if path == "/" else path.lstrip("/")
        target = (self.store.static_dir / rel).resolve()
        try:
            target.relative_to(self.store.static_dir.resolve())
        except ValueError:
            return False
        if not target.is_file():
            return False
        body = target.read_bytes()
        ctype = {"html": "text/html", "js": "text/javascript",
                 "css": "text/css", "map": "application/json"}.get(
            target.suffix.lstrip("."), "application/octet-stream")
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)
        return True


def make_server(store: SessionStore, host: str = "127.0.0.1",
                port: int = 0) -> ThreadingHTTPServer:
    handler = type("BoundHandler", (ApiHandler,), {"store": store})
    return ThreadingHTTPServer((host, port), handler)


def run_server(store: SessionStore, host: str, port: int) -> None:
    frontend = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if store.static_dir is None and frontend.is_dir():
        store.static_dir = frontend
    server = make_server(store, host, port)
    try:
        server.serve_forever()
    finally:
        server.server_close()
