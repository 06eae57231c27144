/**
 * String renderers: SVG for the hierarchy, HTML for the move list and
 * culprit panel.  Keeping them string-valued makes the whole render
 * path testable without a DOM.
 */

import type { HierarchyLayout } from './layout.js';
import type { SessionView } from './view.js';

function esc(text: string): string {
  return text
    .replaceAll('&', '&amp;')
    .replaceAll('<', '&lt;')
    .replaceAll('>', '&gt;')
    .replaceAll('"', '&quot;');
}

export function renderHierarchySvg(layout: HierarchyLayout): string {
  if (layout.empty) {
    return '<svg class="hierarchy empty" width="300" height="60">'
      + '<text x="10" y="30">no hierarchy yet: assert a default</text></svg>';
  }
  const pos = new Map(layout.nodes.map((n) => [n.code, n]));
  const parts: string[] = [
    `<svg class="hierarchy" width="${layout.width}" height="${layout.height}" `
    + `viewBox="0 0 ${layout.width} ${layout.height}">`,
  ];
  for (const edge of layout.edges) {
    const a = pos.get(edge.from);
    const b = pos.get(edge.to);
    if (!a || !b) continue;
    parts.push(
      `<line class="hasse" x1="${a.x}" y1="${a.y}" x2="${b.x}" y2="${b.y}"/>`,
    );
  }
  for (const node of layout.nodes) {
    parts.push(
      `<g class="cell" data-code="${node.code}">`
      + `<circle cx="${node.x}" cy="${node.y}" r="22"/>`
      + `<text class="code" x="${node.x}" y="${node.y}">${esc(node.code)}</text>`
      + `<title>${esc(node.expression)} (${node.size} models; valid: ${
        node.valid.join(', ') || 'none'})</title>`
      + '</g>',
    );
  }
  for (const packet of layout.packets) {
    parts.push(
      `<g class="packet ${packet.kind}" data-cell="${packet.cell}">`
      + `<rect x="${packet.x - 16}" y="${packet.y - 10}" width="32" height="20"/>`
      + `<text x="${packet.x}" y="${packet.y}">${packet.kind}(${packet.cell})</text>`
      + '</g>',
    );
  }
  parts.push('</svg>');
  return parts.join('');
}

export function renderMoveList(view: SessionView): string {
  const items = view.rows.map((row) => {
    const classes = ['move', ...row.badges];
    if (view.highlighted.has(row.id)) classes.push('culprit');
    if (row.inAllMis) classes.push('in-all-mis');
    const badges = row.badges
      .map((b) => `<span class="badge ${b}">${b}</span>`)
      .join('');
    return (
      `<li class="${classes.join(' ')}" data-id="${row.id}">`
      + `<span class="id">${row.id}</span> `
      + `<span class="author">${esc(row.author)}</span> `
      + `<span class="kind">${row.kind}</span> `
      + `<span class="summary">${esc(row.summary)}</span>${badges}</li>`
    );
  });
  return `<ul class="moves">${items.join('')}</ul>`;
}

export function renderMisPanel(view: SessionView): string {
  if (view.mis.length === 0) {
    return '<div class="mis-panel empty">no minimal inconsistent sets</div>';
  }
  const sets = view.mis.map((row) => {
    const cls = row.fullyDefended ? 'mis fully-defended' : 'mis';
    return `<div class="${cls}">{${row.members.join(', ')}}</div>`;
  });
  return `<div class="mis-panel">${sets.join('')}</div>`;
}

export function renderPhaseBanner(view: SessionView): string {
  return `<div class="phase phase-${view.phase}">${esc(view.phaseBanner)}</div>`;
}
