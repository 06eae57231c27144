/**
 * Move composition: narrow the choices the server would accept.
 *
 * Legality lives server-side; the composer only disables drafts the
 * last delta already rules out and shows server rejections verbatim.
 */

import type { MoveKind, StateView } from './types.js';

export interface MoveDraft {
  kind: MoveKind;
  author: string;
  target?: string;
  component?: string;
  mode?: string;
  payloadText?: string;
}

export interface DraftCheck {
  ok: boolean;
  reason?: string;
}

/** Components the server reports as attackable on this move. */
export function legalComponents(state: StateView, targetId: string): string[] {
  const move = state.moves.find((m) => m.id === targetId);
  return move ? [...move.attackable_components] : [];
}

export function validateDraft(state: StateView, draft: MoveDraft): DraftCheck {
  if (draft.kind === 'Attack' || draft.kind === 'Defend') {
    if (!draft.target) return { ok: false, reason: 'pick a target move' };
    const components = legalComponents(state, draft.target);
    if (components.length === 0) {
      return { ok: false, reason: `${draft.target} cannot be attacked` };
    }
    if (draft.kind === 'Attack') {
      if (!draft.component) return { ok: false, reason: 'pick a component' };
      if (!components.includes(draft.component)) {
        return {
          ok: false,
          reason: `component ${draft.component} is not open on ${draft.target}`,
        };
      }
    }
  }
  if (draft.kind === 'RetractVote' && state.phase !== 'retraction-vote') {
    return { ok: false, reason: 'no retraction vote is open' };
  }
  if (
    (draft.kind === 'AssertFact' ||
      draft.kind === 'AssertClassicalRule' ||
      draft.kind === 'AssertDefault') &&
    state.phase !== 'open'
  ) {
    return { ok: false, reason: `assertions are closed in phase ${state.phase}` };
  }
  return { ok: true };
}

/** The inline banner for a server-side rejection, shown verbatim. */
export function rejectionBanner(detail: string): string {
  return `rejected: ${detail}`;
}
