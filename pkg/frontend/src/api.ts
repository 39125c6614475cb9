/** Thin typed client over the documented session endpoints. All server
 * interaction goes through this module; nothing else touches fetch. */

import type {
  MessageResponse,
  SchemaResponse,
  SessionCreated,
  SessionSnapshot,
} from "./types.js";

/** A message was sent while another was still processing (HTTP 409). */
export class ConflictError extends Error {
  readonly status = 409;
  constructor(detail: string) {
    super(detail);
    this.name = "ConflictError";
  }
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        /* non-JSON error body */
      }
      if (response.status === 409) throw new ConflictError(detail);
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  createSession(strategy = "es", k = 2): Promise<SessionCreated> {
    return this.request<SessionCreated>("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ strategy, k }),
    });
  }

  sendMessage(sessionId: string, text: string, debug = false): Promise<MessageResponse> {
    const query = debug ? "?debug=1" : "";
    return this.request<MessageResponse>(
      `/sessions/${encodeURIComponent(sessionId)}/messages${query}`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ text }),
      },
    );
  }

  getSession(sessionId: string): Promise<SessionSnapshot> {
    return this.request<SessionSnapshot>(`/sessions/${encodeURIComponent(sessionId)}`);
  }

  getSchema(): Promise<SchemaResponse> {
    return this.request<SchemaResponse>("/catalog/schema");
  }
}
