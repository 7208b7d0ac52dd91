// SVG rendering of a scene description plus hover/click plumbing.

import { layoutScene } from "./layout.js";
import { Scene, SceneNode } from "./scene.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface RenderCallbacks {
    onNodeClick?(node: SceneNode): void;
    onNodeHover?(node: SceneNode | null): void;
}

function el(name: string, attrs: Record<string, string>): SVGElement {
    const node = document.createElementNS(SVG_NS, name);
    for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
    return node;
}

export function renderScene(container: HTMLElement, scene: Scene,
                            callbacks: RenderCallbacks = {}): void {
    container.replaceChildren();
    const width = Math.max(container.clientWidth, 640);
    const height = Math.max(container.clientHeight, 480);
    const pos = layoutScene(scene, width, height);

    const svg = el("svg", { width: String(width), height: String(height) });
    const defs = el("defs", {});
    const marker = el("marker", {
        id: "arrow", viewBox: "0 0 10 10", refX: "9", refY: "5",
        markerWidth: "7", markerHeight: "7", orient: "auto-start-reverse",
    });
    marker.appendChild(el("path", { d: "M 0 0 L 10 5 L 0 10 z", fill: "#555" }));
    defs.appendChild(marker);
    svg.appendChild(defs);

    for (const edge of scene.edges) {
        const a = pos.get(edge.source);
        const b = pos.get(edge.target);
        if (!a || !b) continue;
        let path: SVGElement;
        if (edge.source === edge.target) {
            path = el("path", {
                d: `M ${a.x} ${a.y - 14} C ${a.x - 55} ${a.y - 70}, ` +
                   `${a.x + 55} ${a.y - 70}, ${a.x + 6} ${a.y - 14}`,
                fill: "none",
            });
        } else {
            path = el("line", {
                x1: String(a.x), y1: String(a.y),
                x2: String(b.x), y2: String(b.y),
            });
        }
        path.setAttribute("stroke", edge.color);
        path.setAttribute("stroke-width", String(edge.width));
        if (edge.dashed) path.setAttribute("stroke-dasharray", "6 4");
        path.setAttribute("marker-end", "url(#arrow)");
        svg.appendChild(path);
        if (edge.label) {
            const mx = edge.source === edge.target ? a.x : (a.x + b.x) / 2;
            const my = edge.source === edge.target ? a.y - 74 : (a.y + b.y) / 2 - 4;
            const text = el("text", { x: String(mx), y: String(my),
                                      class: "edge-label" });
            text.textContent = edge.label;
            svg.appendChild(text);
        }
    }

    for (const node of scene.nodes) {
        const p = pos.get(node.key);
        if (!p) continue;
        const group = el("g", { class: `scene-node kind-${node.kind}` });
        const w = Math.max(44, node.label.length * 7.5 + 18);
        const shape = el("rect", {
            x: String(p.x - w / 2), y: String(p.y - 14),
            width: String(w), height: "28",
            rx: node.kind === "variable" ? "14" : "4",
            fill: node.fill,
            stroke: node.stroke ?? "#333",
            "stroke-width": node.stroke ? "2.5" : node.pinned ? "2.5" : "1",
        });
        if (node.pinned) shape.setAttribute("stroke", "#0055cc");
        group.appendChild(shape);
        if (node.kind === "group") {
            const chevron = el("text", { x: String(p.x - w / 2 + 6),
                                         y: String(p.y + 5), class: "chevron" });
            chevron.textContent = "»";
            group.appendChild(chevron);
        }
        const text = el("text", { x: String(p.x), y: String(p.y + 4),
                                  class: "node-label" });
        text.textContent = node.label;
        group.appendChild(text);
        group.addEventListener("click", () => callbacks.onNodeClick?.(node));
        group.addEventListener("mouseenter", () => callbacks.onNodeHover?.(node));
        group.addEventListener("mouseleave", () => callbacks.onNodeHover?.(null));
        svg.appendChild(group);
    }
    container.appendChild(svg);
}
