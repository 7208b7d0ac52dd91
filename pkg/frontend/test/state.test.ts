// View-state transitions: toggles, expand/collapse splicing, zoom, crumbs.

import { describe, expect, it } from "vitest";
import { GraphEnvelope, ZoomEnvelope } from "../src/model.js";
import { buildMixedScene, buildView, collapseNode, enterZoom, expandNode,
         goBack, initialState, requestZoom, setLevel,
         toggleStyle } from "../src/state.js";
import octreeFixture from "./fixtures/octree.json";
import exprtreeFixture from "./fixtures/exprtree.json";

const octree = octreeFixture as unknown as GraphEnvelope;
const exprtree = exprtreeFixture as unknown as GraphEnvelope;

function faceGroupId(): number {
    return octree.reduced!.nodes.find(
        n => n.covers.length > 1 && n.types.includes("Point"))!.id;
}

describe("expand and collapse", () => {
    it("expanding a group splices its covered nodes into the scene", () => {
        const rid = faceGroupId();
        const covered = octree.reduced!.nodes.find(n => n.id === rid)!.covers;
        const state = expandNode(initialState("h"), rid);
        const scene = buildMixedScene(octree, state);
        const keys = new Set(scene.nodes.map(n => n.key));
        expect(keys.has(`r${rid}`)).toBe(false);
        for (const id of covered) expect(keys.has(`n${id}`)).toBe(true);
        // interior edges of the spliced group are drawn with labels
        const internal = scene.edges.filter(
            e => e.source.startsWith("n") && e.target.startsWith("n"));
        expect(internal.map(e => e.label).sort()).toEqual(["[]", "pts"]);
    });

    it("collapse after expand restores the original scene", () => {
        const rid = faceGroupId();
        const start = initialState("h");
        const expanded = expandNode(start, rid);
        const back = collapseNode(expanded, rid);
        expect(buildMixedScene(octree, back))
            .toEqual(buildMixedScene(octree, start));
    });

    it("expanding a singleton group shows just that node", () => {
        const singleton = octree.reduced!.nodes.find(
            n => n.id > 0 && n.covers.length === 1)!;
        const state = expandNode(initialState("h"), singleton.id);
        const scene = buildMixedScene(octree, state);
        const keys = new Set(scene.nodes.map(n => n.key));
        expect(keys.has(`n${singleton.covers[0]}`)).toBe(true);
        expect(keys.has(`r${singleton.id}`)).toBe(false);
    });
});

describe("style toggles are involutive", () => {
    it("toggling twice restores an identical scene description", () => {
        for (const name of ["heat", "diagnostics", "collapseMultiEdges"] as const) {
            const s0 = setLevel(initialState("h"), "abstract");
            const s2 = toggleStyle(toggleStyle(s0, name), name);
            expect(buildView(exprtree, s2)).toEqual(buildView(exprtree, s0));
            expect(s2.toggles).toEqual(s0.toggles);
        }
    });
});

describe("mark and zoom", () => {
    const zoomEnvelope: ZoomEnvelope = {
        // what the server returns for {"interesting": [7]} on exprtree
        graph: {
            format: "ahg-1",
            nodes: [
                { id: 0, types: [], card: [1, 1] },
                { id: 1, types: [], card: [1, 1] },
                { id: 2, types: ["Var[]"], card: [1, 1] },
                { id: 3, types: ["Add", "Mult", "Sub"], card: [4, 4] },
                { id: 4, types: ["Var"], card: [1, 1] },
                { id: 5, types: ["Var"], card: [1, 1] },
                { id: 6, types: ["Const"], card: [2, 2] },
            ],
            edges: [
                { src: 0, label: "env", tgt: 2, inj: true },
                { src: 0, label: "exp", tgt: 3, inj: true },
                { src: 2, label: "[]", tgt: 1, inj: true },
                { src: 2, label: "[]", tgt: 4, inj: true },
                { src: 2, label: "[]", tgt: 5, inj: true },
                { src: 3, label: "l", tgt: 3, inj: true },
                { src: 3, label: "l", tgt: 4, inj: false },
                { src: 3, label: "r", tgt: 3, inj: true },
                { src: 3, label: "r", tgt: 5, inj: true },
                { src: 3, label: "r", tgt: 6, inj: true },
            ],
            shapes: [], root: 0, null: 1,
        },
        lengths: { "2": 3 },
        metrics: [],
        findings: [],
        interesting: [7],
        pinnedNodes: { "7": 4 },
    };

    it("marking an object produces a scene with its singleton node pinned", () => {
        const state = enterZoom(initialState("h"), zoomEnvelope);
        const scene = buildView(exprtree, state);
        const pinnedNode = scene.nodes.find(n => n.key === "n4")!;
        expect(pinnedNode.pinned).toBe(true);
        expect(pinnedNode.label).toBe("Var");
        // the other Var stays a separate unpinned singleton
        const other = scene.nodes.find(n => n.key === "n5")!;
        expect(other.pinned).toBe(false);
    });

    it("breadcrumbs return to the previous level", () => {
        const start = initialState("h");
        const zoomed = enterZoom(start, zoomEnvelope);
        expect(zoomed.level).toBe("zoomed");
        expect(zoomed.trail).toHaveLength(1);
        const back = goBack(zoomed);
        expect(back.level).toBe("reduced");
        expect(back.trail).toHaveLength(0);
        expect(buildView(octree, back)).toEqual(buildView(octree, start));
    });

    it("refuses more than 64 marked objects client-side", () => {
        const ids = Array.from({ length: 70 }, (_, i) => i + 1);
        const result = requestZoom(ids);
        expect(result.ok).toBe(false);
        if (!result.ok) expect(result.reason).toContain("64");
    });

    it("deduplicates and sorts requested ids", () => {
        const result = requestZoom([9, 3, 3, 1]);
        expect(result).toEqual({ ok: true, ids: [1, 3, 9] });
    });
});
