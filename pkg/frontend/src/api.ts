// Thin fetch wrappers for the heapgraph HTTP API.

import { CompareDiff, ExpansionView, GraphEnvelope, NodeDetail, SnapshotInfo,
         ZoomEnvelope } from "./model.js";

async function getJson<T>(url: string): Promise<T> {
    const resp = await fetch(url);
    if (!resp.ok) {
        throw new Error(`${url}: HTTP ${resp.status}`);
    }
    return resp.json() as Promise<T>;
}

export function listSnapshots(): Promise<SnapshotInfo[]> {
    return getJson("/api/snapshots");
}

export function fetchGraph(hash: string,
                           view: "abstract" | "reduced"): Promise<GraphEnvelope> {
    return getJson(`/api/graph/${hash}?view=${view}`);
}

export function fetchNodeDetail(hash: string, id: number): Promise<NodeDetail> {
    return getJson(`/api/graph/${hash}/node/${id}`);
}

export function fetchExpansion(hash: string, reducedId: number): Promise<ExpansionView> {
    return getJson(`/api/graph/${hash}/expand/${reducedId}`);
}

export async function postZoom(hash: string, ids: number[]): Promise<ZoomEnvelope> {
    const resp = await fetch(`/api/graph/${hash}/zoom`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ interesting: ids }),
    });
    if (!resp.ok) {
        const body = await resp.json().catch(() => ({ error: `HTTP ${resp.status}` }));
        throw new Error((body as { error?: string }).error ?? `HTTP ${resp.status}`);
    }
    return resp.json() as Promise<ZoomEnvelope>;
}

export function parseCompare(doc: unknown): CompareDiff {
    const d = doc as CompareDiff;
    if (d.result !== "leq" && d.result !== "incomparable") {
        throw new Error("not a compare result document");
    }
    return { result: d.result, diffs: d.diffs ?? [] };
}
