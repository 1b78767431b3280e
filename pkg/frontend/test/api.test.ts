import { describe, expect, it } from "vitest";

import { ApiError, SearchApi } from "../src/api";
import type { QueryResponse } from "../src/types";

import planted from "./fixtures/planted_query.json";
import docList from "./fixtures/doc_list.json";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function stubApi(handler: (input: string, init?: RequestInit) => Response) {
  const calls: Array<{ input: string; init?: RequestInit }> = [];
  const api = new SearchApi("http://stub", (input, init) => {
    calls.push({ input, init });
    return Promise.resolve(handler(input, init));
  });
  return { api, calls };
}

describe("query", () => {
  it("posts the query and returns the parsed payload", async () => {
    const { api, calls } = stubApi(() => jsonResponse(planted));
    const result = await api.query("needle text", 0.05, 50);
    expect(result.ranking[0]).toBe("planted");
    expect(result.votes[result.ranking[0]]).toBeGreaterThanOrEqual(1);
    expect(calls[0].input).toBe("http://stub/query");
    const sent = JSON.parse(String(calls[0].init?.body));
    expect(sent).toEqual({ text: "needle text", alpha: 0.05, max_blocks: 50 });
  });

  it("omits optional parameters when unset", async () => {
    const { api, calls } = stubApi(() => jsonResponse(planted));
    await api.query("needle text");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({
      text: "needle text",
    });
  });

  it("raises a typed error from the error body", async () => {
    const { api } = stubApi(() =>
      jsonResponse(
        { error: { code: "bad_alpha", message: "alpha must lie in [0, 1]" } },
        400,
      ),
    );
    const err = await api.query("x", 7).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(400);
    expect(err.code).toBe("bad_alpha");
  });

  it("survives non-JSON error bodies", async () => {
    const { api } = stubApi(() => new Response("boom", { status: 500 }));
    const err = await api.query("x").catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.code).toBe("http_error");
  });
});

describe("documents", () => {
  it("lists documents", async () => {
    const { api } = stubApi(() => jsonResponse(docList));
    const listing = await api.listDocuments();
    expect(listing.documents.length).toBeGreaterThan(0);
    expect(listing.documents[0].doc_id).toBeDefined();
  });

  it("encodes ids and query parameters in the highlight path", async () => {
    const { api, calls } = stubApi(() =>
      jsonResponse({ doc_id: "a b", query_id: "q/1", highlights: [] }),
    );
    await api.getHighlights("a b", "q/1");
    expect(calls[0].input).toBe(
      "http://stub/docs/a%20b/highlights?query_id=q%2F1",
    );
  });
});

describe("fixture contract", () => {
  it("matches the documented wire schema", () => {
    const payload = planted as QueryResponse;
    expect(typeof payload.query_id).toBe("string");
    expect(typeof payload.alpha).toBe("number");
    expect(Array.isArray(payload.ranking)).toBe(true);
    for (const block of payload.flagged) {
      expect(block.end).toBeGreaterThan(block.start);
      expect(block.ncd).toBeGreaterThanOrEqual(0);
      expect(block.ncd).toBeLessThanOrEqual(1.1);
      expect(payload.ranking).toContain(block.doc_id);
    }
    for (const [docId, spans] of Object.entries(payload.highlights)) {
      expect(payload.votes[docId]).toBeGreaterThanOrEqual(1);
      for (const [s, e] of spans) expect(e).toBeGreaterThan(s);
    }
  });
});
