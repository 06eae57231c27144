/**
 * Layered layout for the cell hierarchy diagram.
 *
 * Rank of a cell = longest chain of direct-successor edges reaching it
 * from a minimal cell; within a rank, cells order by code, so layouts
 * are deterministic.  Packet nodes (mu below, o above) hang off their
 * cell column.
 */

import type { HierarchyView } from './types.js';

export interface LaidOutNode {
  code: string;
  expression: string;
  size: number;
  valid: string[];
  rank: number;
  x: number;
  y: number;
}

export interface PacketNode {
  cell: string;
  kind: 'mu' | 'o';
  size: number;
  x: number;
  y: number;
}

export interface HierarchyLayout {
  nodes: LaidOutNode[];
  edges: { from: string; to: string }[];
  packets: PacketNode[];
  width: number;
  height: number;
  empty: boolean;
}

export const COLUMN = 170;
export const ROW = 110;

export function ranks(view: HierarchyView): Map<string, number> {
  const out = new Map<string, number>();
  const incoming = new Map<string, string[]>();
  for (const cell of view.cells) incoming.set(cell.code, []);
  for (const [below, above] of view.hasse) incoming.get(above)?.push(below);
  const rank = (code: string): number => {
    const cached = out.get(code);
    if (cached !== undefined) return cached;
    const preds = incoming.get(code) ?? [];
    const value = preds.length === 0 ? 0 : 1 + Math.max(...preds.map(rank));
    out.set(code, value);
    return value;
  };
  for (const cell of view.cells) rank(cell.code);
  return out;
}

/** One-line cell description for the details panel (shown on click). */
export function cellDetails(view: HierarchyView, code: string): string {
  const cell = view.cells.find((c) => c.code === code);
  if (!cell) return `unknown cell ${code}`;
  const valid = cell.valid.length > 0 ? cell.valid.join(', ') : 'none';
  return `${cell.code}: ${cell.expression} | ${cell.size} models | valid defaults: ${valid}`;
}

export function layoutHierarchy(view: HierarchyView): HierarchyLayout {
  if (view.cells.length === 0) {
    return { nodes: [], edges: [], packets: [], width: 0, height: 0, empty: true };
  }
  const rankOf = ranks(view);
  const byRank = new Map<number, string[]>();
  for (const cell of view.cells) {
    const r = rankOf.get(cell.code) ?? 0;
    const bucket = byRank.get(r) ?? [];
    bucket.push(cell.code);
    byRank.set(r, bucket);
  }
  const maxRank = Math.max(...byRank.keys());
  const widest = Math.max(...[...byRank.values()].map((b) => b.length));
  const nodes: LaidOutNode[] = [];
  const position = new Map<string, { x: number; y: number }>();
  for (const [r, bucket] of [...byRank.entries()].sort((a, b) => a[0] - b[0])) {
    bucket.sort();
    bucket.forEach((code, index) => {
      const cell = view.cells.find((c) => c.code === code);
      if (!cell) return;
      const x = (index + 1) * (COLUMN * widest) / (bucket.length + 1);
      const y = (maxRank - r) * ROW + ROW / 2;
      position.set(code, { x, y });
      nodes.push({ ...cell, rank: r, x, y });
    });
  }
  const packets: PacketNode[] = view.packets.map((p) => {
    const at = position.get(p.cell) ?? { x: 0, y: 0 };
    return {
      ...p,
      x: at.x + (p.kind === 'mu' ? -28 : 28),
      y: at.y + (p.kind === 'mu' ? 26 : -26),
    };
  });
  return {
    nodes,
    edges: view.hasse.map(([from, to]) => ({ from, to })),
    packets,
    width: COLUMN * widest + COLUMN,
    height: (maxRank + 1) * ROW,
    empty: false,
  };
}
