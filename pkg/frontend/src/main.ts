// Application wiring: snapshot picker, level switcher, style toggles, node
// detail panel with mark-and-zoom, and breadcrumbs for returning to earlier
// abstraction levels.

import { fetchExpansion, fetchGraph, fetchNodeDetail, listSnapshots,
         postZoom } from "./api.js";
import { GraphEnvelope, NodeDetail } from "./model.js";
import { renderScene } from "./render.js";
import { SceneNode, StyleToggles } from "./scene.js";
import { ViewState, buildView, collapseNode, enterZoom, expandNode, goBack,
         initialState, requestZoom, setLevel, toggleStyle } from "./state.js";

let state: ViewState | null = null;
let envelope: GraphEnvelope | null = null;
const marked = new Set<number>();

const $ = (id: string) => document.getElementById(id)!;

function notice(text: string, isError = false): void {
    const banner = $("banner");
    banner.textContent = text;
    banner.className = isError ? "error" : text ? "info" : "";
}

function redraw(): void {
    if (!state || !envelope) return;
    renderScene($("canvas"), buildView(envelope, state), {
        onNodeClick: handleClick,
        onNodeHover: handleHover,
    });
    $("crumbs").textContent = state.trail.length
        ? `depth ${state.trail.length} — click "back" to return`
        : "";
    ($("back") as HTMLButtonElement).disabled = state.trail.length === 0;
    for (const name of ["heat", "diagnostics", "collapseMultiEdges"] as const) {
        ($(`toggle-${name}`) as HTMLInputElement).checked = state.toggles[name];
    }
}

async function handleClick(node: SceneNode): Promise<void> {
    if (!state || !envelope) return;
    if (node.kind === "group" && node.refId !== null) {
        if (state.expanded.has(node.refId)) {
            state = collapseNode(state, node.refId);
        } else {
            try {
                await fetchExpansion(state.hash, node.refId);
                state = expandNode(state, node.refId);
            } catch (err) {
                notice(`expansion unavailable: ${err}`, true);
                return;
            }
        }
        redraw();
        return;
    }
    if (node.kind === "node" && node.refId !== null && state.level !== "reduced") {
        const detail = await fetchNodeDetail(state.hash, node.refId);
        showDetail(detail);
    }
}

async function handleHover(node: SceneNode | null): Promise<void> {
    if (!state || !node || node.refId === null || node.kind !== "node"
        || state.level === "reduced") {
        return;
    }
    try {
        const detail = await fetchNodeDetail(state.hash, node.refId);
        $("hover").textContent =
            `${detail.types.join(", ")} — ${detail.memberCount} object(s), ` +
            `card [${detail.card[0]}, ${detail.card[1]}]` +
            (detail.metrics ? `, ${detail.metrics.totalBytes} bytes` : "");
    } catch {
        /* hover detail is best-effort */
    }
}

function showDetail(detail: NodeDetail): void {
    const panel = $("detail");
    panel.replaceChildren();
    const title = document.createElement("h3");
    title.textContent = `node ${detail.id}: ${detail.types.join(", ")}`;
    panel.appendChild(title);
    const info = document.createElement("p");
    info.textContent = `${detail.memberCount} objects, card ` +
        `[${detail.card[0]}, ${detail.card[1]}]`;
    panel.appendChild(info);
    const list = document.createElement("div");
    list.className = "members";
    for (const oid of detail.members.slice(0, 200)) {
        const btn = document.createElement("button");
        btn.textContent = marked.has(oid) ? `#${oid} *` : `#${oid}`;
        btn.onclick = () => {
            if (marked.has(oid)) marked.delete(oid); else marked.add(oid);
            btn.textContent = marked.has(oid) ? `#${oid} *` : `#${oid}`;
        };
        list.appendChild(btn);
    }
    panel.appendChild(list);
    const zoomBtn = document.createElement("button");
    zoomBtn.textContent = "zoom with marked objects";
    zoomBtn.className = "primary";
    zoomBtn.onclick = () => zoomWithMarked();
    panel.appendChild(zoomBtn);
}

async function zoomWithMarked(): Promise<void> {
    if (!state) return;
    const request = requestZoom([...marked]);
    if (!request.ok) {
        notice(request.reason, true);
        return;
    }
    try {
        const zoomed = await postZoom(state.hash, request.ids);
        state = enterZoom(state, zoomed);
        notice(`pinned ${request.ids.length} object(s)`);
        redraw();
    } catch (err) {
        notice(`zoom failed: ${err}`, true);
    }
}

async function openSnapshot(hash: string): Promise<void> {
    envelope = await fetchGraph(hash, "reduced");
    state = initialState(hash);
    marked.clear();
    notice("");
    redraw();
}

async function boot(): Promise<void> {
    const snapshots = await listSnapshots();
    const select = $("snapshot") as HTMLSelectElement;
    select.replaceChildren();
    for (const s of snapshots) {
        const option = document.createElement("option");
        option.value = s.hash;
        option.textContent = `${s.hash.slice(0, 12)} — ${s.objectCount} objects`;
        select.appendChild(option);
    }
    select.onchange = () => openSnapshot(select.value);

    ($("level") as HTMLSelectElement).onchange = (e) => {
        if (!state) return;
        state = setLevel(state, (e.target as HTMLSelectElement).value as never);
        redraw();
    };
    for (const name of ["heat", "diagnostics", "collapseMultiEdges"] as const) {
        ($(`toggle-${name}`) as HTMLInputElement).onchange = () => {
            if (!state) return;
            state = toggleStyle(state, name as keyof StyleToggles);
            redraw();
        };
    }
    ($("back") as HTMLButtonElement).onclick = () => {
        if (!state) return;
        state = goBack(state);
        redraw();
    };
    if (snapshots.length) await openSnapshot(snapshots[0].hash);
    else notice("no snapshots loaded — start the server with snapshot files", true);
}

boot().catch(err => notice(`failed to start: ${err}`, true));
