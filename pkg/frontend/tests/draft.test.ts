import { describe, expect, it } from 'vitest';

import { legalComponents, rejectionBanner, validateDraft } from '../src/draft.js';
import { renderMisPanel, renderMoveList } from '../src/render.js';
import { buildSessionView } from '../src/view.js';
import type { StateView } from '../src/types.js';

import tweety from './fixtures/tweety_state.json';
import rejection from './fixtures/illegal_attack.json';
import symmetric from './fixtures/symmetric_state.json';

const tweetyState = tweety as unknown as StateView;
const symmetricState = symmetric as unknown as StateView;

describe('move drafts', () => {
  it('narrows attack components to what the server reports', () => {
    // m1 is the classical rule: no rule-itself among its components
    expect(legalComponents(tweetyState, 'm1')).toEqual([
      'prerequisite',
      'conclusion',
      'applicability',
    ]);
    expect(legalComponents(tweetyState, 'm2')).toContain('exception-membership');
  });

  it('disables an illegal attack draft before submission', () => {
    const check = validateDraft(tweetyState, {
      kind: 'Attack',
      author: 'p1',
      target: 'm1',
      component: 'rule-itself',
    });
    expect(check.ok).toBe(false);
    expect(check.reason).toContain('rule-itself');
  });

  it('accepts a legal attack draft', () => {
    const check = validateDraft(tweetyState, {
      kind: 'Attack',
      author: 'p1',
      target: 'm2',
      component: 'conclusion',
      mode: 'argue-consistent-negation',
    });
    expect(check.ok).toBe(true);
  });

  it('shows the server rejection verbatim in the inline banner', () => {
    const detail = (rejection as { body: { detail: string } }).body.detail;
    const banner = rejectionBanner(detail);
    expect(banner).toBe(`rejected: ${detail}`);
    expect(banner).toContain('classical rules themselves are beyond attack');
    expect((rejection as { status: number }).status).toBe(400);
  });

  it('blocks assertions outside the open phase', () => {
    const check = validateDraft(symmetricState, {
      kind: 'AssertFact',
      author: 'p1',
      payloadText: '{x}',
    });
    expect(check.ok).toBe(false);
    expect(check.reason).toContain('retraction-vote');
  });
});

describe('panel rendering', () => {
  it('highlights every culprit and flags members of all sets', () => {
    const html = renderMoveList(buildSessionView(symmetricState));
    expect(html.match(/class="[^"]*culprit/g)).toHaveLength(4);
    expect(html.match(/in-all-mis/g)).toHaveLength(1);
    expect(html).toContain('data-id="m4"');
  });

  it('renders one entry per minimal inconsistent set', () => {
    const html = renderMisPanel(buildSessionView(symmetricState));
    expect(html.match(/class="mis"/g)).toHaveLength(3);
    expect(html).toContain('{m1, m2, m4}');
  });
});
