/** Typed client for the session service endpoints. */

import type {
  HierarchyView,
  MoveKind,
  MoveResponse,
  SessionCreated,
  StateView,
} from './types.js';

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown>; text(): Promise<string> }>;

export class ServerRejection extends Error {
  constructor(public readonly detail: string, public readonly status: number) {
    super(detail);
  }
}

export interface SessionRequest {
  participants: { id: string; name?: string; role?: string }[];
  atoms?: string[];
  elements?: string[];
  seed_theory?: string;
}

export interface MoveRequest {
  author: string;
  kind: MoveKind;
  payload?: Record<string, unknown>;
  based_on?: string[];
}

async function rejectionOf(response: {
  status: number;
  json(): Promise<unknown>;
}): Promise<ServerRejection> {
  let detail = `request failed with status ${response.status}`;
  try {
    const body = (await response.json()) as { detail?: string };
    if (body && typeof body.detail === 'string') detail = body.detail;
  } catch {
    // keep the generic detail
  }
  return new ServerRejection(detail, response.status);
}

export class SessionClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch as unknown as FetchLike,
  ) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
    if (!response.ok) throw await rejectionOf(response);
    return (await response.json()) as T;
  }

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`);
    if (!response.ok) throw await rejectionOf(response);
    return (await response.json()) as T;
  }

  createSession(request: SessionRequest): Promise<SessionCreated> {
    return this.post('/session', request);
  }

  move(sessionId: string, request: MoveRequest): Promise<MoveResponse> {
    return this.post(`/session/${sessionId}/move`, request);
  }

  command(sessionId: string, name: string, args?: Record<string, unknown>): Promise<MoveResponse> {
    return this.post(`/session/${sessionId}/move`, { verb: 'command', name, args });
  }

  async state(sessionId: string): Promise<StateView> {
    const body = await this.get<{ state: StateView }>(`/session/${sessionId}/state`);
    return body.state;
  }

  hierarchy(sessionId: string): Promise<HierarchyView> {
    return this.get(`/session/${sessionId}/hierarchy`);
  }

  async transcript(sessionId: string): Promise<string> {
    const response = await this.fetchImpl(`${this.baseUrl}/session/${sessionId}/transcript`);
    if (!response.ok) throw await rejectionOf(response);
    return response.text();
  }
}

export interface Subscription {
  stop(): void;
}

/**
 * Poll the state endpoint, emitting each delta exactly once.
 *
 * The cursor is the state's move count, so a reconnect resumes from
 * the last acknowledged delta instead of replaying the whole session.
 */
export function connectSession(
  client: SessionClient,
  sessionId: string,
  onDelta: (state: StateView) => void,
  onError: (error: Error) => void = () => undefined,
  intervalMs = 750,
  scheduler: (fn: () => void, ms: number) => unknown = setTimeout,
): Subscription {
  let stopped = false;
  let lastSeq = -1;
  const tick = async () => {
    if (stopped) return;
    try {
      const state = await client.state(sessionId);
      if (state.seq !== lastSeq) {
        lastSeq = state.seq;
        onDelta(state);
      }
    } catch (error) {
      onError(error instanceof Error ? error : new Error(String(error)));
    }
    if (!stopped) scheduler(tick, intervalMs);
  };
  void tick();
  return {
    stop() {
      stopped = true;
    },
  };
}
