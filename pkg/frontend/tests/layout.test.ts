import { describe, expect, it } from 'vitest';

import { layoutHierarchy, ranks } from '../src/layout.js';
import { renderHierarchySvg } from '../src/render.js';
import type { HierarchyView } from '../src/types.js';

import fixtureE from './fixtures/fixture_e_hierarchy.json';

const view = fixtureE as unknown as HierarchyView;

describe('hierarchy layout', () => {
  it('lays out the six cells and seven direct-successor edges', () => {
    const layout = layoutHierarchy(view);
    expect(layout.nodes).toHaveLength(6);
    expect(layout.edges).toHaveLength(7);
    expect(layout.empty).toBe(false);
  });

  it('ranks cells by their longest chain from the bottom', () => {
    const byCode = ranks(view);
    expect(byCode.get('000')).toBe(0);
    expect(byCode.get('100')).toBe(1);
    expect(byCode.get('010')).toBe(1);
    expect(byCode.get('110')).toBe(2);
    expect(byCode.get('011')).toBe(2);
    expect(byCode.get('111')).toBe(3);
  });

  it('separates mu and o packet markers per cell', () => {
    const layout = layoutHierarchy(view);
    const cells = new Set(layout.packets.map((p) => `${p.kind}(${p.cell})`));
    expect(cells.has('mu(000)')).toBe(true);
    expect(cells.has('o(000)')).toBe(false); // nothing fails vacuous defaults
    expect(cells.has('mu(111)')).toBe(true);
    expect(cells.has('o(111)')).toBe(true);
    const mu = layout.packets.find((p) => p.cell === '111' && p.kind === 'mu');
    const o = layout.packets.find((p) => p.cell === '111' && p.kind === 'o');
    expect(mu && o && mu.y > o.y).toBe(true); // mu hangs below, o above
  });

  it('is deterministic', () => {
    expect(layoutHierarchy(view)).toEqual(layoutHierarchy(view));
  });

  it('renders an svg with one circle per cell and one line per edge', () => {
    const svg = renderHierarchySvg(layoutHierarchy(view));
    expect(svg.match(/<circle/g)).toHaveLength(6);
    expect(svg.match(/<line class="hasse"/g)).toHaveLength(7);
    expect(svg).toContain('data-code="000"');
  });

  it('renders a placeholder for an empty hierarchy', () => {
    const svg = renderHierarchySvg(
      layoutHierarchy({ cells: [], hasse: [], packets: [], packet_pairs: [] }),
    );
    expect(svg).toContain('no hierarchy yet');
  });
});

describe('cell details', () => {
  it('describes a clicked cell with code, size and valid defaults', async () => {
    const { cellDetails } = await import('../src/layout.js');
    const text = cellDetails(view, '011');
    expect(text).toContain('011');
    expect(text).toContain('2 models');
    expect(text).toContain('m3, m4');
    expect(cellDetails(view, '999')).toContain('unknown cell');
  });
});
