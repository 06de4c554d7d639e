import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function jsonResponse(payload: unknown, status = 200) {
  return {
    ok: status >= 200 && status < 300,
    status,
    statusText: status === 200 ? "OK" : "Bad Request",
    json: async () => payload,
  };
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("ApiClient.search", () => {
  it("hits /search with encoded query, mode, and k", async () => {
    const fetchMock = vi.fn(async () =>
      jsonResponse({
        query: "a b",
        mode: "semantic",
        fallback: false,
        took_ms: 1.5,
        hits: [],
      }),
    );
    vi.stubGlobal("fetch", fetchMock);
    const client = new ApiClient("http://api.test");
    const result = await client.search("a b", "semantic", 3);
    expect(fetchMock).toHaveBeenCalledWith(
      "http://api.test/search?q=a+b&mode=semantic&k=3",
    );
    expect(result.took_ms).toBe(1.5);
    expect(result.hits).toEqual([]);
  });

  it("defaults k to 10", async () => {
    const fetchMock = vi.fn(async () => jsonResponse({ hits: [] }));
    vi.stubGlobal("fetch", fetchMock);
    await new ApiClient().search("q", "keyword");
    expect(fetchMock).toHaveBeenCalledWith("/search?q=q&mode=keyword&k=10");
  });

  it("surfaces the server's error field", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => jsonResponse({ error: "q parameter required" }, 400)),
    );
    const failure = await new ApiClient().search("", "semantic").catch((e) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure.message).toBe("q parameter required");
    expect(failure.status).toBe(400);
  });

  it("falls back to the status line when the error body is not JSON", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => ({
        ok: false,
        status: 502,
        statusText: "Bad Gateway",
        json: async () => {
          throw new SyntaxError("not json");
        },
      })),
    );
    const failure = await new ApiClient().health().catch((e) => e);
    expect(failure.message).toBe("502 Bad Gateway");
    expect(failure.status).toBe(502);
  });

  it("maps network failure to status 0", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => {
        throw new TypeError("fetch failed");
      }),
    );
    const failure = await new ApiClient("http://down.test")
      .search("q", "semantic")
      .catch((e) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure.status).toBe(0);
    expect(failure.message).toMatch(/unreachable/);
  });
});

describe("ApiClient endpoints", () => {
  it("health and classTree use their fixed paths", async () => {
    const fetchMock = vi.fn(async (url: string) =>
      url.endsWith("/health")
        ? jsonResponse({ status: "ok", doc_count: 2, class_count: 3 })
        : jsonResponse({ roots: [] }),
    );
    vi.stubGlobal("fetch", fetchMock);
    const client = new ApiClient("http://api.test");
    expect((await client.health()).doc_count).toBe(2);
    expect((await client.classTree()).roots).toEqual([]);
    expect(fetchMock).toHaveBeenCalledWith("http://api.test/health");
    expect(fetchMock).toHaveBeenCalledWith("http://api.test/ontology/classes");
  });
});
