"""Command-line front end.

Exit codes: 0 success (and "within" for compare), 1 compare found differences
or an embedding check failed, 2 usage errors, 3 file or schema errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .abstract_graph import (EmbeddingDomainError, EmbeddingMap, SchemaError,
                             canonical_order, canonicalize, check_embedding,
                             deserialize, relabel, serialize)
from .abstraction import AbstractionOptions, abstract_heap
from .algebra import WIDEN, JOIN, AmbiguousGraphError, compare, merge
from .diagnostics import container_lengths, diagnose
from .dgml import StyleConfig, export_dgml
from .heap_model import SnapshotError, parse_snapshot
from .reduction import reduce as reduce_graph


class _CliError(Exception):
    def __init__(self, message: str, code: int = 3):
        super().__init__(message)
        self.code = code


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise _CliError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, data: bytes) -> None:
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise _CliError(f"cannot write {path}: {exc.strerror}") from None


def _load_snapshot(path: str):
    try:
        return parse_snapshot(_read(path))
    except SnapshotError as exc:
        raise _CliError(f"{path}: {exc}") from None


def _load_graph(path: str):
    try:
        return deserialize(_read(path))
    except SchemaError as exc:
        raise _CliError(f"{path}: {exc}") from None


def _load_mu(path: str) -> EmbeddingMap:
    try:
        doc = json.loads(_read(path).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise _CliError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != "mu-1" \
            or not isinstance(doc.get("map"), dict):
        raise _CliError(f'{path}: expected {{"format": "mu-1", "map": {{...}}}}')
    try:
        return EmbeddingMap({int(k): int(v) for k, v in doc["map"].items()})
    except (TypeError, ValueError):
        raise _CliError(f"{path}: map keys and values must be integers") from None


def _mu_document(mu: EmbeddingMap) -> bytes:
    doc = {"format": "mu-1", "map": {str(k): v for k, v in sorted(mu.to_node.items())}}
    return (json.dumps(doc, separators=(",", ":")) + "\n").encode("utf-8")


def _parse_ids(text: str) -> frozenset[int]:
    try:
        return frozenset(int(part) for part in text.split(",") if part)
    except ValueError:
        raise _CliError("ids must be a comma-separated list of integers", 2) from None


def _cmd_abstract(args) -> int:
    h = _load_snapshot(args.snapshot)
    opts = AbstractionOptions(interesting_objects=_parse_ids(args.interesting or ""))
    try:
        g, mu = abstract_heap(h, opts)
    except ValueError as exc:
        raise _CliError(str(exc)) from None
    order = canonical_order(g)
    cg = relabel(g, order)
    cmu = mu.compose(order)
    payload = serialize(cg)
    if args.output:
        _write(args.output, payload)
    else:
        sys.stdout.write(payload.decode("utf-8"))
    if args.mu:
        _write(args.mu, _mu_document(cmu))
    if args.dgml:
        metrics, findings = diagnose(h, cg, cmu)
        doc = export_dgml(cg, StyleConfig(), metrics,
                          container_lengths(h, cg, cmu), findings)
        _write(args.dgml, doc.encode("utf-8"))
    return 0


def _reduced_document(r) -> dict:
    return {
        "nodes": [{"id": rid, "covers": sorted(rn.covered),
                   "types": sorted(rn.types), "card": rn.card.to_json(),
                   "interesting": rn.interesting, "unreachable": rn.unreachable,
                   **({"bytes": rn.bytes} if rn.bytes is not None else {})}
                  for rid, rn in sorted(r.nodes.items())],
        "edges": [list(e) for e in r.edges],
        "vars": [list(v) for v in r.var_edges],
    }


def _cmd_reduce(args) -> int:
    g = _load_graph(args.graph)
    r = reduce_graph(g)
    sys.stdout.write(json.dumps(_reduced_document(r), separators=(",", ":"),
                                sort_keys=True) + "\n")
    if args.dgml:
        _write(args.dgml, export_dgml(r).encode("utf-8"))
    return 0


def _cmd_compare(args) -> int:
    g1 = _load_graph(args.graph1)
    g2 = _load_graph(args.graph2)
    try:
        result = compare(g1, g2)
    except AmbiguousGraphError as exc:
        raise _CliError(f"cannot compare: {exc}") from None
    sys.stdout.write(json.dumps(result.to_json(), separators=(",", ":"),
                                sort_keys=True) + "\n")
    return 0 if result.leq else 1


def _cmd_merge(args) -> int:
    g1 = _load_graph(args.graph1)
    g2 = _load_graph(args.graph2)
    result = merge(g1, g2, WIDEN if args.widen else JOIN)
    _write(args.output, serialize(canonicalize(result.graph)))
    return 0


def _cmd_diagnose(args) -> int:
    h = _load_snapshot(args.snapshot)
    g, mu = abstract_heap(h)
    order = canonical_order(g)
    cg, cmu = relabel(g, order), mu.compose(order)
    metrics, findings = diagnose(h, cg, cmu)
    for f in findings:
        sys.stdout.write(f"{f.kind}\tnode {f.node}\t{json.dumps(f.evidence, sort_keys=True)}\n")
    if args.report:
        snap_hash = hashlib.sha256(_read(args.snapshot)).hexdigest()
        doc = {"tool": f"heapgraph {__version__}",
               "snapshot": f"sha256:{snap_hash}",
               "metrics": [m.to_json() for m in metrics],
               "findings": [f.to_json() for f in findings]}
        _write(args.report, (json.dumps(doc, separators=(",", ":"), sort_keys=True)
                             + "\n").encode("utf-8"))
    return 0


def _cmd_check(args) -> int:
    h = _load_snapshot(args.snapshot)
    g = _load_graph(args.graph)
    mu = _load_mu(args.mu)
    try:
        report = check_embedding(h, g, mu)
    except EmbeddingDomainError as exc:
        raise _CliError(f"unusable witness map: {exc}") from None
    doc = {"pass": report.ok,
           "failures": [{"predicate": v.predicate, "message": v.message}
                        for v in report.failures]}
    sys.stdout.write(json.dumps(doc, separators=(",", ":"), sort_keys=True) + "\n")
    return 0 if report.ok else 1


def _cmd_serve(args) -> int:
    from .service import SessionStore, run_server

    store = SessionStore()
    for path in args.snapshots:
        data = _read(path)
        try:
            digest = store.register(data)
        except SnapshotError as exc:
            raise _CliError(f"{path}: {exc}") from None
        sys.stderr.write(f"loaded {path} as {digest[:12]}\n")
    run_server(store, args.host, args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heapgraph",
        description="Summarize, compare, merge, and inspect heap snapshots.")
    parser.add_argument("--version", action="version",
                        version=f"heapgraph {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("abstract", help="compute the abstract graph of a snapshot")
    p.add_argument("snapshot")
    p.add_argument("-o", "--output", help="write the ahg-1 document here")
    p.add_argument("--dgml", help="also write a DGML rendering")
    p.add_argument("--mu", help="also write the witness map (mu-1 JSON)")
    p.add_argument("--interesting", help="comma-separated object ids kept singleton")
    p.set_defaults(fn=_cmd_abstract)

    p = sub.add_parser("reduce", help="dominator-collapse an abstract graph")
    p.add_argument("graph")
    p.add_argument("--dgml", help="write a DGML rendering of the reduced view")
    p.set_defaults(fn=_cmd_reduce)

    p = sub.add_parser("compare", help="order test between two abstract graphs")
    p.add_argument("graph1")
    p.add_argument("graph2")
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("merge", help="merge two abstract graphs")
    p.add_argument("graph1")
    p.add_argument("graph2")
    p.add_argument("--widen", action="store_true",
                   help="widen growing upper bounds to infinity")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_merge)

    p = sub.add_parser("diagnose", help="memory metrics and bloat findings")
    p.add_argument("snapshot")
    p.add_argument("--report", help="write the full report JSON here")
    p.set_defaults(fn=_cmd_diagnose)

    p = sub.add_parser("check", help="verify a snapshot against a graph and witness map")
    p.add_argument("snapshot")
    p.add_argument("graph")
    p.add_argument("mu")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("serve", help="serve snapshots over the local HTTP API")
    p.add_argument("snapshots", nargs="+")
    p.add_argument("--port", type=int, default=8077)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(fn=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except _CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
