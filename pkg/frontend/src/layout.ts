// Small deterministic force layout: seeded initial ring, spring forces along
// edges, pairwise repulsion, fixed iteration count.  Geometry is presentation
// only and never tested for exact values.

import { Scene } from "./scene.js";

export interface Point {
    x: number;
    y: number;
}

export function layoutScene(scene: Scene, width: number,
                            height: number): Map<string, Point> {
    const keys = scene.nodes.map(n => n.key);
    const pos = new Map<string, Point>();
    const cx = width / 2, cy = height / 2;
    const radius = Math.min(width, height) / 3;
    keys.forEach((key, i) => {
        const angle = (2 * Math.PI * i) / Math.max(keys.length, 1);
        pos.set(key, { x: cx + radius * Math.cos(angle),
                       y: cy + radius * Math.sin(angle) });
    });

    const index = new Map(keys.map((k, i) => [k, i]));
    const springs = scene.edges
        .filter(e => e.source !== e.target)
        .map(e => [index.get(e.source)!, index.get(e.target)!] as const)
        .filter(([a, b]) => a !== undefined && b !== undefined);

    const xs = keys.map(k => pos.get(k)!.x);
    const ys = keys.map(k => pos.get(k)!.y);
    const ideal = 140;
    for (let iter = 0; iter < 150; iter++) {
        const fx = new Array(keys.length).fill(0);
        const fy = new Array(keys.length).fill(0);
        for (let i = 0; i < keys.length; i++) {
            for (let j = i + 1; j < keys.length; j++) {
                let dx = xs[i] - xs[j], dy = ys[i] - ys[j];
                let d2 = dx * dx + dy * dy;
                if (d2 < 1) { dx = 1; dy = 1; d2 = 2; }
                const f = 12000 / d2;
                const d = Math.sqrt(d2);
                fx[i] += (dx / d) * f; fy[i] += (dy / d) * f;
                fx[j] -= (dx / d) * f; fy[j] -= (dy / d) * f;
            }
        }
        for (const [a, b] of springs) {
            const dx = xs[b] - xs[a], dy = ys[b] - ys[a];
            const d = Math.max(Math.sqrt(dx * dx + dy * dy), 1);
            const f = 0.02 * (d - ideal);
            fx[a] += (dx / d) * f; fy[a] += (dy / d) * f;
            fx[b] -= (dx / d) * f; fy[b] -= (dy / d) * f;
        }
        const damp = 0.85 * (1 - iter / 160);
        for (let i = 0; i < keys.length; i++) {
            xs[i] += Math.max(-25, Math.min(25, fx[i] * damp));
            ys[i] += Math.max(-25, Math.min(25, fy[i] * damp));
            xs[i] = Math.max(60, Math.min(width - 60, xs[i]));
            ys[i] = Math.max(40, Math.min(height - 40, ys[i]));
        }
    }
    keys.forEach((key, i) => pos.set(key, { x: xs[i], y: ys[i] }));
    return pos;
}
