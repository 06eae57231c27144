import { describe, expect, it } from 'vitest';

import { buildSessionView } from '../src/view.js';
import { renderMisPanel, renderMoveList, renderPhaseBanner } from '../src/render.js';
import type { StateView } from '../src/types.js';

import symmetric from './fixtures/symmetric_state.json';
import replayed from './fixtures/symmetric_state_replayed.json';

const state = symmetric as unknown as StateView;
const replayedState = replayed as unknown as StateView;

describe('session view projection', () => {
  it('renders the three highlighted culprit sets with the last move in all', () => {
    const view = buildSessionView(state);
    expect(view.mis).toHaveLength(3);
    expect(view.mis.map((m) => m.members)).toEqual([
      ['m1', 'm2', 'm4'],
      ['m1', 'm3', 'm4'],
      ['m2', 'm3', 'm4'],
    ]);
    expect(view.highlighted).toEqual(new Set(['m1', 'm2', 'm3', 'm4']));
    const y = view.rows.find((r) => r.id === 'm4');
    expect(y?.inAllMis).toBe(true);
    expect(y?.misCount).toBe(3);
    const a = view.rows.find((r) => r.id === 'm1');
    expect(a?.inAllMis).toBe(false);
    expect(a?.misCount).toBe(2);
  });

  it('shows the retraction-vote banner', () => {
    const view = buildSessionView(state);
    expect(view.phase).toBe('retraction-vote');
    expect(view.phaseBanner).toContain('vote on retractions');
  });

  it('summarizes extensional assertions as element sets', () => {
    const view = buildSessionView(state);
    expect(view.rows[0]?.summary).toBe('{x, a}');
    expect(view.rows[3]?.summary).toBe('{a, b, c}');
  });

  it('is a pure projection: same delta, same view, input untouched', () => {
    const copy = JSON.parse(JSON.stringify(state)) as StateView;
    const first = buildSessionView(copy);
    const second = buildSessionView(copy);
    expect(second).toEqual(first);
    expect(copy).toEqual(state);
  });

  it('renders a replayed transcript exactly like the live run', () => {
    const live = buildSessionView(state);
    const fromReplay = buildSessionView(replayedState);
    expect(fromReplay).toEqual(live);
    expect(renderMoveList(fromReplay)).toBe(renderMoveList(live));
    expect(renderMisPanel(fromReplay)).toBe(renderMisPanel(live));
    expect(renderPhaseBanner(fromReplay)).toBe(renderPhaseBanner(live));
  });

  it('marks badges from the delta alone', () => {
    const tweaked = JSON.parse(JSON.stringify(state)) as StateView;
    const moves = tweaked.moves;
    moves[0]!.contested = true;
    moves[1]!.defended = true;
    moves[2]!.retracted = true;
    moves[3]!.hanging = true;
    const view = buildSessionView(tweaked);
    expect(view.rows.map((r) => r.badges)).toEqual([
      ['contested'],
      ['defended'],
      ['retracted'],
      ['hanging'],
    ]);
  });
});
