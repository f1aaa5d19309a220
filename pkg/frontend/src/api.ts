/**
 * Typed client for the game API: new game, state, move, abandon.
 * All state lives on the server; this module only moves JSON.
 */

export interface NodeInfo {
  id: number;
  title: string;
}

export interface NewGameResponse {
  session_id: string;
  start: NodeInfo;
  goal: NodeInfo;
  hop_cap: number;
}

export interface GameState {
  session_id: string;
  current: NodeInfo;
  goal: NodeInfo;
  hops: number;
  hop_cap: number;
  neighbors: NodeInfo[];
  visited_ids: number[];
  finished: boolean;
  success: boolean;
}

export class ApiError extends Error {
  constructor(message: string, public readonly status: number) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const res = await fetch(url, init);
  if (!res.ok) {
    let detail = `${res.status}`;
    try {
      const body = await res.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(detail, res.status);
  }
  if (res.status === 204) return undefined as T;
  return res.json() as Promise<T>;
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  newGame(req: { goal_index?: number; goal_id?: number }): Promise<NewGameResponse> {
    return request(`${this.baseUrl}/api/game/new`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
  }

  state(sessionId: string): Promise<GameState> {
    return request(`${this.baseUrl}/api/game/${sessionId}`);
  }

  move(sessionId: string, next: number): Promise<GameState> {
    return request(`${this.baseUrl}/api/game/${sessionId}/move`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ next }),
    });
  }

  abandon(sessionId: string): Promise<void> {
    return request(`${this.baseUrl}/api/game/${sessionId}`, { method: "DELETE" });
  }
}
