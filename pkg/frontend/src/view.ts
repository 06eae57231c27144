/**
 * Pure projection of a server state delta into what the console shows.
 *
 * No inference happens here: every badge, highlight and banner is a
 * function of the last delta alone, so rendering a replayed transcript
 * and rendering a live run of the same moves give identical views.
 */

import type { MoveView, StateView } from './types.js';

export type Badge = 'retracted' | 'hanging' | 'contested' | 'defended';

export interface MoveRow {
  id: string;
  author: string;
  kind: string;
  summary: string;
  badges: Badge[];
  misCount: number;
  inAllMis: boolean;
  attackableComponents: string[];
}

export interface MisRow {
  members: string[];
  fullyDefended: boolean;
}

export interface SessionView {
  phase: string;
  phaseBanner: string;
  rows: MoveRow[];
  mis: MisRow[];
  highlighted: Set<string>;
  proposal: { target: string; votes: { voter: string; yes: boolean }[] } | null;
  verdict: string | null;
}

const PHASE_BANNERS: Record<string, string> = {
  open: 'Open: assertions welcome',
  'retraction-vote': 'Inconsistency found: vote on retractions',
  'attack-defense': 'Attack or defend the culprits',
  failed: 'Deadlock: the arbiter declares failure',
  closed: 'Session closed',
};

export function moveSummary(move: MoveView): string {
  const p = move.payload;
  if (typeof p['formula'] === 'string') return p['formula'];
  if (Array.isArray(p['elements'])) return `{${(p['elements'] as string[]).join(', ')}}`;
  if (typeof p['scope'] === 'string' && typeof p['conclusion'] === 'string') {
    return `${p['scope']} ~> ${p['conclusion']}`;
  }
  if (typeof p['target'] === 'string') {
    const component = typeof p['component'] === 'string' ? ` (${p['component']})` : '';
    return `on ${p['target']}${component}`;
  }
  if (typeof p['conclusion'] === 'string') return p['conclusion'];
  return '';
}

export function buildSessionView(state: StateView): SessionView {
  const misRows: MisRow[] = state.mis.map((members) => ({
    members: [...members],
    fullyDefended: members.every((id) => {
      const move = state.moves.find((m) => m.id === id);
      return move !== undefined && move.defended && !move.retracted;
    }),
  }));
  const highlighted = new Set<string>();
  for (const row of misRows) for (const id of row.members) highlighted.add(id);

  const rows: MoveRow[] = state.moves.map((move) => {
    const badges: Badge[] = [];
    if (move.retracted) badges.push('retracted');
    if (move.hanging) badges.push('hanging');
    if (move.contested) badges.push('contested');
    if (move.defended) badges.push('defended');
    const misCount = state.frequencies[move.id] ?? 0;
    return {
      id: move.id,
      author: move.author,
      kind: move.kind,
      summary: moveSummary(move),
      badges,
      misCount,
      inAllMis: state.mis.length > 0 && state.mis.every((s) => s.includes(move.id)),
      attackableComponents: [...move.attackable_components],
    };
  });

  return {
    phase: state.phase,
    phaseBanner: PHASE_BANNERS[state.phase] ?? state.phase,
    rows,
    mis: misRows,
    highlighted,
    proposal: state.open_proposal
      ? { target: state.open_proposal.target, votes: [...state.open_proposal.votes] }
      : null,
    verdict: state.verdict ? state.verdict.outcome : null,
  };
}
