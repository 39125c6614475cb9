import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, ConflictError } from "../src/api.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function clientWith(handler: (input: string, init?: RequestInit) => Response) {
  const calls: Array<{ input: string; init?: RequestInit }> = [];
  const client = new ApiClient("", async (input, init) => {
    calls.push({ input, init });
    return handler(input, init);
  });
  return { client, calls };
}

describe("ApiClient", () => {
  it("creates sessions through POST /sessions", async () => {
    const { client, calls } = clientWith(() =>
      jsonResponse(201, { session_id: "s1", strategy: "cr", k: 3 }),
    );
    const created = await client.createSession("cr", 3);
    expect(created.session_id).toBe("s1");
    expect(calls[0].input).toBe("/sessions");
    expect(calls[0].init?.method).toBe("POST");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({ strategy: "cr", k: 3 });
  });

  it("sends messages to the session endpoint with optional debug flag", async () => {
    const { client, calls } = clientWith(() =>
      jsonResponse(200, { type: "question", relaxed: [], candidate_count: 1 }),
    );
    await client.sendMessage("s1", "hello", true);
    expect(calls[0].input).toBe("/sessions/s1/messages?debug=1");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({ text: "hello" });
  });

  it("maps 409 to ConflictError with the server detail", async () => {
    const { client } = clientWith(() =>
      jsonResponse(409, { detail: "previous message still processing" }),
    );
    await expect(client.sendMessage("s1", "hi")).rejects.toThrowError(ConflictError);
    await expect(client.sendMessage("s1", "hi")).rejects.toThrow(
      "previous message still processing",
    );
  });

  it("maps other failures to ApiError with status", async () => {
    const { client } = clientWith(() => jsonResponse(404, { detail: "unknown session" }));
    const error = await client.getSession("nope").catch((e) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect((error as ApiError).status).toBe(404);
  });

  it("fetches the schema", async () => {
    const { client, calls } = clientWith(() => jsonResponse(200, { dimensions: [] }));
    await client.getSchema();
    expect(calls[0].input).toBe("/catalog/schema");
  });
});
