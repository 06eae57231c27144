/**
 * Browser wiring: connect to a session, keep the panels in sync with
 * every delta, and compose moves through the draft narrowing.
 */

import { SessionClient, ServerRejection, connectSession } from './api.js';
import { MoveDraft, rejectionBanner, validateDraft } from './draft.js';
import { cellDetails, layoutHierarchy } from './layout.js';
import type { HierarchyView } from './types.js';
import {
  renderHierarchySvg,
  renderMisPanel,
  renderMoveList,
  renderPhaseBanner,
} from './render.js';
import type { MoveKind, StateView } from './types.js';
import { buildSessionView } from './view.js';

interface Elements {
  banner: HTMLElement;
  moves: HTMLElement;
  mis: HTMLElement;
  hierarchy: HTMLElement;
  rejection: HTMLElement;
  form: HTMLFormElement;
}

function grab(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
}

export function startConsole(baseUrl: string, sessionId: string): void {
  const client = new SessionClient(baseUrl);
  const els: Elements = {
    banner: grab('phase-banner'),
    moves: grab('move-list'),
    mis: grab('mis-panel'),
    hierarchy: grab('hierarchy-panel'),
    rejection: grab('rejection-banner'),
    form: grab('move-form') as HTMLFormElement,
  };
  let lastState: StateView | null = null;
  let lastHierarchy: HierarchyView | null = null;

  const repaint = async (state: StateView) => {
    lastState = state;
    const view = buildSessionView(state);
    els.banner.innerHTML = renderPhaseBanner(view);
    els.moves.innerHTML = renderMoveList(view);
    els.mis.innerHTML = renderMisPanel(view);
    try {
      lastHierarchy = await client.hierarchy(sessionId);
      els.hierarchy.innerHTML = renderHierarchySvg(layoutHierarchy(lastHierarchy));
    } catch {
      // extensional sessions have no hierarchy endpoint content
    }
  };

  els.hierarchy.addEventListener('click', (event) => {
    const target = (event.target as Element | null)?.closest('[data-code]');
    const code = target?.getAttribute('data-code');
    const details = document.getElementById('cell-details');
    if (code && details && lastHierarchy) {
      details.textContent = cellDetails(lastHierarchy, code);
    }
  });

  connectSession(client, sessionId, (state) => void repaint(state), (error) => {
    els.rejection.textContent = `connection: ${error.message} (retrying)`;
  });

  els.form.addEventListener('submit', (event) => {
    event.preventDefault();
    const data = new FormData(els.form);
    const draft: MoveDraft = {
      kind: String(data.get('kind') ?? 'AssertFact') as MoveKind,
      author: String(data.get('author') ?? ''),
      target: String(data.get('target') ?? '') || undefined,
      component: String(data.get('component') ?? '') || undefined,
      mode: String(data.get('mode') ?? '') || undefined,
      payloadText: String(data.get('payload') ?? '') || undefined,
    };
    if (!lastState) return;
    const check = validateDraft(lastState, draft);
    if (!check.ok) {
      els.rejection.textContent = rejectionBanner(check.reason ?? 'invalid draft');
      return;
    }
    const payload: Record<string, unknown> = {};
    if (draft.target) payload['target'] = draft.target;
    if (draft.component) payload['component'] = draft.component;
    if (draft.mode) payload['mode'] = draft.mode;
    if (draft.payloadText) {
      if (draft.kind === 'AssertFact' && draft.payloadText.trim().startsWith('{')) {
        payload['elements'] = draft.payloadText
          .replace(/[{}]/g, '')
          .split(',')
          .map((s) => s.trim())
          .filter(Boolean);
      } else if (draft.kind === 'AssertDefault') {
        const [scope, conclusion] = draft.payloadText.split('~>');
        payload['scope'] = (scope ?? '').trim();
        payload['conclusion'] = (conclusion ?? '').trim();
      } else {
        payload['formula'] = draft.payloadText.trim();
      }
    }
    client
      .move(sessionId, { author: draft.author, kind: draft.kind, payload })
      .then((response) => {
        els.rejection.textContent = '';
        return repaint(response.state);
      })
      .catch((error) => {
        els.rejection.textContent =
          error instanceof ServerRejection
            ? rejectionBanner(error.detail)
            : String(error);
      });
  });
}

declare global {
  interface Window {
    defargConsole: typeof startConsole;
  }
}

if (typeof window !== 'undefined') {
  window.defargConsole = startConsole;
}
