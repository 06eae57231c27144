import { describe, expect, it } from 'vitest';

import { SessionClient, ServerRejection, connectSession } from '../src/api.js';
import type { FetchLike } from '../src/api.js';
import type { StateView } from '../src/types.js';

import symmetric from './fixtures/symmetric_state.json';

const state = symmetric as unknown as StateView;

function fakeFetch(
  handler: (url: string, init?: { body?: string }) => { status: number; body: unknown },
): FetchLike {
  return async (url, init) => {
    const { status, body } = handler(url, init);
    return {
      ok: status >= 200 && status < 300,
      status,
      json: async () => body,
      text: async () => (typeof body === 'string' ? body : JSON.stringify(body)),
    };
  };
}

describe('session client', () => {
  it('posts moves and returns the state delta', async () => {
    const seen: string[] = [];
    const client = new SessionClient(
      'http://server',
      fakeFetch((url, init) => {
        seen.push(url);
        expect(JSON.parse(init?.body ?? '{}').kind).toBe('AssertFact');
        return { status: 200, body: { ok: true, events: [], state } };
      }),
    );
    const response = await client.move('s1', {
      author: 'p1',
      kind: 'AssertFact',
      payload: { elements: ['x'] },
    });
    expect(response.state.phase).toBe('retraction-vote');
    expect(seen).toEqual(['http://server/session/s1/move']);
  });

  it('surfaces rejections with the server detail', async () => {
    const client = new SessionClient(
      'http://server',
      fakeFetch(() => ({ status: 400, body: { detail: 'no such phase' } })),
    );
    await expect(
      client.move('s1', { author: 'p1', kind: 'AssertFact' }),
    ).rejects.toThrowError(ServerRejection);
    await expect(
      client.move('s1', { author: 'p1', kind: 'AssertFact' }),
    ).rejects.toThrow('no such phase');
  });

  it('emits each state delta once and resumes from the cursor', async () => {
    let seq = 1;
    const client = new SessionClient(
      'http://server',
      fakeFetch(() => ({ status: 200, body: { state: { ...state, seq } } })),
    );
    const deltas: number[] = [];
    const pending: (() => void)[] = [];
    const scheduler = (fn: () => void) => {
      pending.push(fn);
      return 0;
    };
    connectSession(client, 's1', (s) => deltas.push(s.seq), () => undefined, 1, scheduler);
    // first poll ran immediately; run three more, one with a repeat seq
    await Promise.resolve();
    await new Promise((r) => setTimeout(r, 0));
    pending.shift()?.();
    await new Promise((r) => setTimeout(r, 0));
    seq = 2;
    pending.shift()?.();
    await new Promise((r) => setTimeout(r, 0));
    pending.shift()?.();
    await new Promise((r) => setTimeout(r, 0));
    expect(deltas).toEqual([1, 2]);
  });

  it('keeps polling through errors and reports them', async () => {
    let fail = true;
    const client = new SessionClient(
      'http://server',
      fakeFetch(() =>
        fail
          ? { status: 500, body: { detail: 'boom' } }
          : { status: 200, body: { state } },
      ),
    );
    const errors: string[] = [];
    const deltas: number[] = [];
    const pending: (() => void)[] = [];
    connectSession(
      client,
      's1',
      (s) => deltas.push(s.seq),
      (e) => errors.push(e.message),
      1,
      (fn) => {
        pending.push(fn);
        return 0;
      },
    );
    await new Promise((r) => setTimeout(r, 0));
    fail = false;
    pending.shift()?.();
    await new Promise((r) => setTimeout(r, 0));
    expect(errors).toEqual(['boom']);
    expect(deltas).toEqual([state.seq]);
  });
});
