import { beforeEach, describe, expect, it, vi } from "vitest";

import type {
  ClassTree,
  ConceptMatch,
  SearchHit,
  SearchMode,
  SearchResponse,
  SearchService,
} from "../src/api.js";
import { ApiError } from "../src/api.js";
import { mountApp } from "../src/app.js";

function hit(title: string, score: number, concepts: ConceptMatch[] = []): SearchHit {
  return {
    doc_id: title,
    score,
    url: `http://health.example/${title}.html`,
    title,
    snippet: `about ${title}`,
    concepts,
  };
}

function response(
  mode: SearchMode,
  hits: SearchHit[],
  extra: Partial<SearchResponse> = {},
): SearchResponse {
  return { query: "q", mode, fallback: false, took_ms: 0.42, hits, ...extra };
}

const direct: ConceptMatch = {
  iri: "http://t.test#Headache",
  label: "Headache",
  via: "direct",
  depth: 0,
  strength: 3,
};
const expanded: ConceptMatch = {
  iri: "http://t.test#Migraine",
  label: "Migraine",
  via: "subclass-expansion",
  depth: 1,
  strength: 4,
};

function deferred<T>() {
  let resolve!: (value: T) => void;
  let reject!: (reason?: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

class FakeService implements SearchService {
  search = vi.fn<SearchService["search"]>();
  classTree = vi.fn<SearchService["classTree"]>();
  health = vi.fn<SearchService["health"]>();
}

let root: HTMLElement;
let service: FakeService;

beforeEach(() => {
  document.body.replaceChildren();
  root = document.createElement("div");
  document.body.appendChild(root);
  service = new FakeService();
});

function panelBody(mode: SearchMode): HTMLElement {
  return root.querySelector(`#panel-${mode} .panel-body`) as HTMLElement;
}

describe("query submission", () => {
  it("a blank query issues no request and shows a hint", async () => {
    const app = mountApp(root, service);
    await app.runSearch("   ");
    expect(service.search).not.toHaveBeenCalled();
    expect(root.querySelector(".hint")?.textContent).toBe("Type a query first.");
    expect(panelBody("semantic").textContent).toContain("No search yet.");
  });

  it("one submit fires both modes and fills both panels", async () => {
    service.search.mockImplementation(async (_q, mode) =>
      mode === "semantic"
        ? response("semantic", [
            hit("headache-remedies", 3.00479062490409, [direct]),
            hit("tension-headache", 2.0039939629496177, [direct, expanded]),
            hit("migraine", 2.0, [expanded]),
          ])
        : response("keyword", [
            hit("headache-remedies", 0.4791),
            hit("tension-headache", 0.3994),
          ]),
    );
    const app = mountApp(root, service);
    await app.runSearch("medicine for the headache");
    expect(service.search).toHaveBeenCalledWith(
      "medicine for the headache",
      "semantic",
    );
    expect(service.search).toHaveBeenCalledWith(
      "medicine for the headache",
      "keyword",
    );
    expect(panelBody("semantic").querySelectorAll(".hit")).toHaveLength(3);
    expect(panelBody("keyword").querySelectorAll(".hit")).toHaveLength(2);
  });

  it("form submit goes through the same path", async () => {
    service.search.mockResolvedValue(response("semantic", []));
    const app = mountApp(root, service);
    app.queryInput.value = "fever";
    (root.querySelector("form.search-form") as HTMLFormElement).dispatchEvent(
      new Event("submit", { cancelable: true }),
    );
    await vi.waitFor(() => expect(service.search).toHaveBeenCalledTimes(2));
  });
});

describe("result rendering", () => {
  it("shows scores and timings exactly as the service sent them", async () => {
    service.search.mockImplementation(async (_q, mode) =>
      response(mode, [hit("tension-headache", 2.0039939629496177, [direct])]),
    );
    const app = mountApp(root, service);
    await app.runSearch("headache");
    const body = panelBody("semantic");
    expect(body.querySelector(".score")?.textContent).toBe("2.0039939629496177");
    expect(body.querySelector(".meta")?.textContent).toBe("1 hits in 0.42 ms");
  });

  it("badges distinguish direct matches from subclass expansions", async () => {
    service.search.mockImplementation(async (_q, mode) =>
      response(mode, [hit("tension-headache", 2.0, [direct, expanded])]),
    );
    const app = mountApp(root, service);
    await app.runSearch("headache");
    const badges = panelBody("semantic").querySelectorAll(".badge");
    expect(badges).toHaveLength(2);
    expect(badges[0]!.className).toBe("badge badge-direct");
    expect(badges[0]!.textContent).toBe("Headache");
    expect(badges[1]!.className).toBe("badge badge-expanded");
    expect(badges[1]!.textContent).toBe("Migraine");
    expect(badges[1]!.title).toBe("subclass-expansion, depth 1, strength 4");
  });

  it("flags a keyword fallback inside the semantic panel", async () => {
    service.search.mockImplementation(async (_q, mode) =>
      response(mode, [hit("x", 0.5)], { fallback: mode === "semantic" }),
    );
    const app = mountApp(root, service);
    await app.runSearch("tension");
    expect(panelBody("semantic").textContent).toContain("keyword ranking");
    expect(panelBody("keyword").textContent).not.toContain("keyword ranking");
  });

  it("an empty result set says so", async () => {
    service.search.mockResolvedValue(response("semantic", []));
    const app = mountApp(root, service);
    await app.runSearch("fever");
    expect(panelBody("keyword").textContent).toContain("Nothing found.");
  });
});

describe("failures", () => {
  it("renders an error banner per failing mode and keeps the app usable", async () => {
    service.search.mockRejectedValue(new ApiError("search service unreachable", 0));
    const app = mountApp(root, service);
    await app.runSearch("fever");
    for (const mode of ["semantic", "keyword"] as const) {
      const banner = panelBody(mode).querySelector(".error-banner");
      expect(banner?.textContent).toContain("search service unreachable");
      expect(panelBody(mode).querySelector(".hit")).toBeNull();
    }
  });

  it("retry re-issues the last query for that panel only", async () => {
    service.search.mockRejectedValueOnce(new ApiError("boom", 500));
    service.search.mockImplementation(async (_q, mode) =>
      response(mode, [hit("dengue", 1.5, [expanded])]),
    );
    const app = mountApp(root, service);
    await app.runSearch("fever");
    const failed = (["semantic", "keyword"] as const).find((mode) =>
      panelBody(mode).querySelector(".error-banner"),
    )!;
    (panelBody(failed).querySelector("button.retry") as HTMLButtonElement).click();
    await vi.waitFor(() => {
      expect(panelBody(failed).querySelectorAll(".hit")).toHaveLength(1);
    });
    expect(panelBody(failed).querySelector(".error-banner")).toBeNull();
    expect(service.search).toHaveBeenLastCalledWith("fever", failed);
  });
});

describe("stale responses", () => {
  it("a slow answer for a superseded query is discarded", async () => {
    const slow = deferred<SearchResponse>();
    const fast = deferred<SearchResponse>();
    let call = 0;
    service.search.mockImplementation((_q, mode) => {
      call += 1;
      if (mode === "keyword") {
        return Promise.resolve(response("keyword", []));
      }
      return call <= 2 ? slow.promise : fast.promise;
    });
    const app = mountApp(root, service);
    const first = app.runSearch("old query");
    const second = app.runSearch("new query");
    fast.resolve(response("semantic", [hit("fresh", 2.0)]));
    await second;
    slow.resolve(response("semantic", [hit("stale", 9.9)]));
    await first;
    const titles = [...panelBody("semantic").querySelectorAll(".hit a")].map(
      (a) => a.textContent,
    );
    expect(titles).toEqual(["fresh"]);
  });
});

describe("ontology browser", () => {
  const tree: ClassTree = {
    roots: [
      {
        iri: "http://t.test#Fever",
        label: "Fever",
        synonyms: [],
        equivalent: [],
        children: [],
      },
    ],
  };

  it("loads the tree and clicking a class fills the query box", async () => {
    service.classTree.mockResolvedValue(tree);
    const app = mountApp(root, service);
    await app.loadTree();
    const pick = root.querySelector("button.class-pick") as HTMLButtonElement;
    expect(pick.textContent).toBe("Fever");
    pick.click();
    expect(app.queryInput.value).toBe("Fever");
  });

  it("a tree failure shows a retry that reloads", async () => {
    service.classTree.mockRejectedValueOnce(new ApiError("down", 0));
    service.classTree.mockResolvedValue(tree);
    const app = mountApp(root, service);
    await app.loadTree();
    const slot = root.querySelector(".tree-slot") as HTMLElement;
    expect(slot.querySelector(".error-banner")).not.toBeNull();
    (slot.querySelector("button.retry") as HTMLButtonElement).click();
    await vi.waitFor(() => {
      expect(slot.querySelector("button.class-pick")).not.toBeNull();
    });
    expect(slot.querySelector(".error-banner")).toBeNull();
  });
});
