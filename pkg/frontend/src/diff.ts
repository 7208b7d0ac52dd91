// Textual panel model for compare output (two loaded snapshots).

import { CompareDiff } from "./model.js";

export interface DiffPanel {
    headline: string;
    rows: { kind: string; subject: string }[];
}

export function buildDiffPanel(diff: CompareDiff): DiffPanel {
    if (diff.result === "leq") {
        return { headline: "first graph fits within the second", rows: [] };
    }
    const rows = [...diff.diffs]
        .sort((a, b) => a.kind.localeCompare(b.kind)
            || a.subject.localeCompare(b.subject));
    return {
        headline: `${rows.length} difference${rows.length === 1 ? "" : "s"}`,
        rows,
    };
}
