// Pure scene construction: abstract/reduced graph documents in, a display
// list out.  Styling mirrors the DGML conventions: the root is never shown
// (variables become their own little nodes), null-only edges disappear,
// maybe-null edges dash, non-injective edges go wide and orange, cardinality
// [1,1] renders white while summaries are shaded, container labels carry
// their shared length, and self-edges show the region's shape.

import { AhgDocument, AhgEdge, GraphEnvelope, NodeMetrics } from "./model.js";

export interface StyleToggles {
    heat: boolean;
    diagnostics: boolean;
    collapseMultiEdges: boolean;
}

export const DEFAULT_TOGGLES: StyleToggles = {
    heat: false,
    diagnostics: false,
    collapseMultiEdges: true,
};

export interface SceneNode {
    key: string;            // "n<id>" | "var:<name>" | "r<id>"
    label: string;
    fill: string;
    stroke: string | null;  // diagnostics outline
    shapeLabel: string | null;
    kind: "node" | "variable" | "group";
    pinned: boolean;
    refId: number | null;   // node id behind this scene element
}

export interface SceneEdge {
    source: string;
    target: string;
    label: string;
    width: number;
    color: string;
    dashed: boolean;
}

export interface Scene {
    nodes: SceneNode[];
    edges: SceneEdge[];
}

export const COLORS = {
    single: "#ffffff",
    summary: "#c0c0c0",
    sharing: "#e07000",
    normalEdge: "#444444",
    finding: "#c00000",
    heat: { hot5: "#ffd700", hot15: "#ff8c00", hot25: "#ff4500" } as Record<string, string>,
};

export function heatBucket(m: NodeMetrics): "hot5" | "hot15" | "hot25" | null {
    if (m.heapFraction > 0.25) return "hot25";
    if (m.heapFraction > 0.15) return "hot15";
    if (m.heapFraction > 0.05) return "hot5";
    return null;
}

function cardIsOne(card: [number, number | "inf"]): boolean {
    return card[0] === 1 && card[1] === 1;
}

function nodeLabel(types: string[], length: number | undefined): string {
    if (types.length === 0) return "(untyped)";
    if (length !== undefined && types.length === 1) {
        const name = types[0];
        return name.endsWith("[]")
            ? `${name.slice(0, -2)}[${length}]`
            : `${name}[${length}]`;
    }
    return [...types].sort().join(", ");
}

function shapeLabelFor(g: AhgDocument, id: number): string | null {
    const facts = g.shapes.filter(s => s.node === id && s.labels.length > 0);
    const trees = facts.filter(s => s.shape === "tree");
    const pick = trees.length
        ? trees.reduce((a, b) => (b.labels.length > a.labels.length ? b : a))
        : facts[0];
    if (!pick) return null;
    return `${pick.shape}{${[...pick.labels].sort().join(", ")}}`;
}

export function buildScene(env: GraphEnvelope, toggles: StyleToggles,
                           pinnedIds: Set<number> = new Set()): Scene {
    const g = env.graph;
    const metricsByNode = new Map(env.metrics.map(m => [m.node, m]));
    const flagged = new Set(env.findings.map(f => f.node));
    const nodes: SceneNode[] = [];
    const edges: SceneEdge[] = [];

    for (const n of g.nodes) {
        if (n.id === g.root || n.id === g.null) continue;
        let fill = cardIsOne(n.card) ? COLORS.single : COLORS.summary;
        if (toggles.heat) {
            const m = metricsByNode.get(n.id);
            const bucket = m ? heatBucket(m) : null;
            if (bucket) fill = COLORS.heat[bucket];
        }
        nodes.push({
            key: `n${n.id}`,
            label: nodeLabel(n.types, env.lengths[String(n.id)]),
            fill,
            stroke: toggles.diagnostics && flagged.has(n.id) ? COLORS.finding : null,
            shapeLabel: shapeLabelFor(g, n.id),
            kind: "node",
            pinned: pinnedIds.has(n.id),
            refId: n.id,
        });
    }

    const varEdges = g.edges.filter(e => e.src === g.root);
    for (const e of [...varEdges].sort((a, b) => a.label.localeCompare(b.label))) {
        nodes.push({
            key: `var:${e.label}`, label: e.label, fill: COLORS.single,
            stroke: null, shapeLabel: null, kind: "variable", pinned: false,
            refId: null,
        });
        if (e.tgt !== g.null) {
            edges.push({
                source: `var:${e.label}`, target: `n${e.tgt}`, label: "",
                width: 1, color: COLORS.normalEdge, dashed: false,
            });
        }
    }

    const nullLabels = new Map<number, Set<string>>();
    for (const e of g.edges) {
        if (e.tgt === g.null && e.src !== g.root) {
            if (!nullLabels.has(e.src)) nullLabels.set(e.src, new Set());
            nullLabels.get(e.src)!.add(e.label);
        }
    }
    const drawable = g.edges.filter(e => e.src !== g.root && e.tgt !== g.null);

    const emit = (src: number, tgt: number, label: string, injective: boolean,
                  maybeNull: boolean) => {
        edges.push({
            source: `n${src}`, target: `n${tgt}`, label,
            width: injective ? 1 : 3,
            color: injective ? COLORS.normalEdge : COLORS.sharing,
            dashed: maybeNull,
        });
    };

    if (toggles.collapseMultiEdges) {
        const grouped = new Map<string, AhgEdge[]>();
        for (const e of drawable) {
            const key = `${e.src}->${e.tgt}`;
            if (!grouped.has(key)) grouped.set(key, []);
            grouped.get(key)!.push(e);
        }
        for (const group of grouped.values()) {
            const { src, tgt } = group[0];
            const labels = group.map(e => e.label).sort();
            const label = src === tgt
                ? shapeLabelFor(g, src) ?? labels.join(", ")
                : labels.join(", ");
            emit(src, tgt, label,
                 group.every(e => e.inj),
                 labels.some(l => nullLabels.get(src)?.has(l)));
        }
    } else {
        for (const e of drawable) {
            emit(e.src, e.tgt, e.label, e.inj,
                 nullLabels.get(e.src)?.has(e.label) ?? false);
        }
    }
    return { nodes, edges };
}

// Reduced overview: groups render with a chevron affordance and can expand.
export function buildReducedScene(env: GraphEnvelope): Scene {
    if (!env.reduced) throw new Error("envelope has no reduced mapping");
    const nodes: SceneNode[] = [];
    const edges: SceneEdge[] = [];
    for (const rn of env.reduced.nodes) {
        if (rn.id <= 0) continue; // root/null sentinels
        const label = rn.unreachable
            ? `(unreachable) ${[...rn.types].sort().join(", ")}`
            : [...rn.types].sort().join(", ");
        nodes.push({
            key: `r${rn.id}`,
            label,
            fill: cardIsOne(rn.card) ? COLORS.single : COLORS.summary,
            stroke: null,
            shapeLabel: null,
            kind: rn.covers.length > 1 ? "group" : "node",
            pinned: false,
            refId: rn.id,
        });
    }
    for (const [name, rid] of [...env.reduced.vars].sort()) {
        nodes.push({
            key: `var:${name}`, label: name, fill: COLORS.single, stroke: null,
            shapeLabel: null, kind: "variable", pinned: false, refId: null,
        });
        if (rid > 0) {
            edges.push({ source: `var:${name}`, target: `r${rid}`, label: "",
                         width: 1, color: COLORS.normalEdge, dashed: false });
        }
    }
    for (const [src, tgt] of env.reduced.edges) {
        if (src <= 0 || tgt <= 0) continue;
        edges.push({ source: `r${src}`, target: `r${tgt}`, label: "",
                     width: 1, color: COLORS.normalEdge, dashed: false });
    }
    return { nodes, edges };
}
