// Payload shapes served by the heapgraph HTTP API.  The viewer never derives
// graph semantics itself: every displayed fact comes from these documents.

export type Card = [number, number | "inf"];

export interface AhgNode {
    id: number;
    types: string[];
    card: Card;
}

export interface AhgEdge {
    src: number;
    label: string;
    tgt: number;
    inj: boolean;
}

export interface AhgShape {
    node: number;
    labels: string[];
    shape: "tree" | "any";
}

export interface AhgDocument {
    format: "ahg-1";
    nodes: AhgNode[];
    edges: AhgEdge[];
    shapes: AhgShape[];
    root: number;
    null: number;
}

export interface NodeMetrics {
    node: number;
    objectCount: number;
    totalBytes: number;
    overheadBytes: number;
    dataBytes: number;
    heapFraction: number;
}

export interface Finding {
    kind: string;
    node: number;
    evidence: Record<string, unknown>;
}

export interface ReducedNodeInfo {
    id: number;
    covers: number[];
    types: string[];
    card: Card;
    interesting: boolean;
    unreachable: boolean;
    bytes?: number;
}

export interface ReducedInfo {
    nodes: ReducedNodeInfo[];
    edges: [number, number][];
    vars: [string, number][];
}

export interface GraphEnvelope {
    graph: AhgDocument;
    lengths: Record<string, number>;
    metrics: NodeMetrics[];
    findings: Finding[];
    reduced?: ReducedInfo;
}

export interface ZoomEnvelope extends GraphEnvelope {
    interesting: number[];
    pinnedNodes: Record<string, number>;
}

export interface NodeDetail {
    id: number;
    types: string[];
    card: Card;
    memberCount: number;
    members: number[];
    metrics: NodeMetrics | null;
}

export interface ExpansionView {
    nodes: number[];
    internalEdges: AhgEdge[];
    boundaryEdges: AhgEdge[];
}

export interface SnapshotInfo {
    hash: string;
    objectCount: number;
    bytes: number;
}

export interface CompareDiff {
    result: "leq" | "incomparable";
    diffs: { kind: string; subject: string }[];
}

export const ELEMENT_LABEL = "[]";
