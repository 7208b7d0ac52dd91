// View-state machine.  All transitions are pure: they return a new state and
// never touch graph data, so toggling a style twice or collapsing after an
// expand provably restores the previous scene.

import { GraphEnvelope, ZoomEnvelope } from "./model.js";
import { DEFAULT_TOGGLES, Scene, SceneEdge, StyleToggles, buildReducedScene,
         buildScene } from "./scene.js";

export const MAX_ZOOM_IDS = 64;

export type ViewLevel = "reduced" | "abstract" | "zoomed";

export interface Crumb {
    level: ViewLevel;
    interesting: number[];
}

export interface ViewState {
    hash: string;
    level: ViewLevel;
    toggles: StyleToggles;
    expanded: ReadonlySet<number>;
    interesting: ReadonlySet<number>;
    zoom: ZoomEnvelope | null;
    trail: Crumb[];
}

export function initialState(hash: string): ViewState {
    return {
        hash,
        level: "reduced",
        toggles: { ...DEFAULT_TOGGLES },
        expanded: new Set(),
        interesting: new Set(),
        zoom: null,
        trail: [],
    };
}

export function toggleStyle(state: ViewState,
                            name: keyof StyleToggles): ViewState {
    return { ...state,
             toggles: { ...state.toggles, [name]: !state.toggles[name] } };
}

export function setLevel(state: ViewState, level: ViewLevel): ViewState {
    return { ...state, level };
}

export function expandNode(state: ViewState, reducedId: number): ViewState {
    const expanded = new Set(state.expanded);
    expanded.add(reducedId);
    return { ...state, expanded };
}

export function collapseNode(state: ViewState, reducedId: number): ViewState {
    const expanded = new Set(state.expanded);
    expanded.delete(reducedId);
    return { ...state, expanded };
}

export type ZoomRequest =
    | { ok: true; ids: number[] }
    | { ok: false; reason: string };

export function requestZoom(ids: number[]): ZoomRequest {
    const unique = [...new Set(ids)].sort((a, b) => a - b);
    if (unique.length > MAX_ZOOM_IDS) {
        return { ok: false,
                 reason: `at most ${MAX_ZOOM_IDS} objects can be marked at ` +
                         `once (got ${unique.length})` };
    }
    return { ok: true, ids: unique };
}

export function enterZoom(state: ViewState, envelope: ZoomEnvelope): ViewState {
    return {
        ...state,
        level: "zoomed",
        interesting: new Set(envelope.interesting),
        zoom: envelope,
        trail: [...state.trail,
                { level: state.level, interesting: [...state.interesting] }],
    };
}

export function goBack(state: ViewState): ViewState {
    if (state.trail.length === 0) return state;
    const trail = [...state.trail];
    const crumb = trail.pop()!;
    return {
        ...state,
        level: crumb.level,
        interesting: new Set(crumb.interesting),
        zoom: crumb.level === "zoomed" ? state.zoom : null,
        trail,
    };
}

// --- scene assembly ---------------------------------------------------------

// Reduced view with any expanded groups spliced in place: expanded groups are
// replaced by their covered abstract nodes, and every abstract edge is
// re-routed to whichever representation its endpoints currently have.
export function buildMixedScene(env: GraphEnvelope, state: ViewState): Scene {
    if (!env.reduced) throw new Error("envelope has no reduced mapping");
    const reducedScene = buildReducedScene(env);
    if (state.expanded.size === 0) return reducedScene;

    const abstractScene = buildScene(env, state.toggles);
    const home = new Map<number, number>();
    for (const rn of env.reduced.nodes) {
        for (const covered of rn.covers) home.set(covered, rn.id);
    }
    const keyFor = (abstractId: number): string | null => {
        const rid = home.get(abstractId);
        if (rid === undefined) return null;
        return state.expanded.has(rid) ? `n${abstractId}` : `r${rid}`;
    };

    const nodes = [];
    for (const sn of reducedScene.nodes) {
        if (sn.kind === "variable") continue;
        if (sn.refId !== null && state.expanded.has(sn.refId)) continue;
        nodes.push(sn);
    }
    for (const sn of abstractScene.nodes) {
        if (sn.kind === "variable") {
            nodes.push(sn);
            continue;
        }
        if (sn.refId !== null && state.expanded.has(home.get(sn.refId) ?? -99)) {
            nodes.push(sn);
        }
    }

    const g = env.graph;
    const seen = new Set<string>();
    const edges: SceneEdge[] = [];
    for (const e of g.edges) {
        if (e.tgt === g.null) continue;
        if (e.src === g.root) {
            const target = keyFor(e.tgt);
            if (target) {
                edges.push({ source: `var:${e.label}`, target, label: "",
                             width: 1, color: "#444444", dashed: false });
            }
            continue;
        }
        const source = keyFor(e.src);
        const target = keyFor(e.tgt);
        if (!source || !target || source === target) continue;
        const bothExpanded = source.startsWith("n") && target.startsWith("n");
        const dedup = `${source}|${target}|${bothExpanded ? e.label : ""}`;
        if (seen.has(dedup)) continue;
        seen.add(dedup);
        edges.push({
            source, target,
            label: bothExpanded ? e.label : "",
            width: bothExpanded && !e.inj ? 3 : 1,
            color: bothExpanded && !e.inj ? "#e07000" : "#444444",
            dashed: false,
        });
    }
    const dedupedEdges = edges.filter((e, i) =>
        edges.findIndex(o => o.source === e.source && o.target === e.target
                             && o.label === e.label) === i);
    return { nodes, edges: dedupedEdges };
}

export function buildView(env: GraphEnvelope, state: ViewState): Scene {
    if (state.level === "zoomed") {
        if (!state.zoom) throw new Error("zoomed view without zoom data");
        const pinned = new Set(Object.values(state.zoom.pinnedNodes));
        return buildScene(state.zoom, state.toggles, pinned);
    }
    if (state.level === "reduced") {
        return buildMixedScene(env, state);
    }
    return buildScene(env, state.toggles);
}
