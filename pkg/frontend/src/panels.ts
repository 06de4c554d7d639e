import type { ConceptMatch, SearchHit, SearchResponse } from "./api.js";

/** One result panel is always in exactly one of these states, so an
 * error and stale results can never show together. */
export type PanelState =
  | { kind: "idle" }
  | { kind: "loading"; query: string }
  | { kind: "error"; message: string }
  | { kind: "result"; response: SearchResponse };

export function renderPanel(
  container: HTMLElement,
  state: PanelState,
  onRetry: () => void,
): void {
  container.replaceChildren();
  switch (state.kind) {
    case "idle": {
      container.appendChild(note("No search yet."));
      return;
    }
    case "loading": {
      container.appendChild(note(`Searching for "${state.query}"…`));
      return;
    }
    case "error": {
      const banner = document.createElement("div");
      banner.className = "error-banner";
      banner.setAttribute("role", "alert");
      const text = document.createElement("span");
      text.textContent = state.message;
      banner.appendChild(text);
      const retry = document.createElement("button");
      retry.type = "button";
      retry.className = "retry";
      retry.textContent = "Retry";
      retry.addEventListener("click", onRetry);
      banner.appendChild(retry);
      container.appendChild(banner);
      return;
    }
    case "result": {
      renderResult(container, state.response);
      return;
    }
  }
}

function note(text: string): HTMLElement {
  const p = document.createElement("p");
  p.className = "note";
  p.textContent = text;
  return p;
}

function renderResult(container: HTMLElement, response: SearchResponse): void {
  const meta = document.createElement("p");
  meta.className = "meta";
  // numbers pass through as-is; the server's took_ms is the one shown
  meta.textContent = `${response.hits.length} hits in ${response.took_ms} ms`;
  container.appendChild(meta);
  if (response.fallback) {
    container.appendChild(
      note("No concept matched the query; showing plain keyword ranking."),
    );
  }
  if (response.hits.length === 0) {
    container.appendChild(note("Nothing found."));
    return;
  }
  const list = document.createElement("ol");
  list.className = "hits";
  for (const hit of response.hits) {
    list.appendChild(renderHit(hit));
  }
  container.appendChild(list);
}

function renderHit(hit: SearchHit): HTMLElement {
  const item = document.createElement("li");
  item.className = "hit";

  const heading = document.createElement("div");
  heading.className = "hit-heading";
  const link = document.createElement("a");
  link.href = hit.url;
  link.textContent = hit.title;
  heading.appendChild(link);
  const score = document.createElement("span");
  score.className = "score";
  score.textContent = String(hit.score);
  heading.appendChild(score);
  item.appendChild(heading);

  const url = document.createElement("div");
  url.className = "hit-url";
  url.textContent = hit.url;
  item.appendChild(url);

  if (hit.concepts.length > 0) {
    const badges = document.createElement("div");
    badges.className = "badges";
    for (const concept of hit.concepts) {
      badges.appendChild(renderBadge(concept));
    }
    item.appendChild(badges);
  }

  const snippet = document.createElement("p");
  snippet.className = "snippet";
  snippet.textContent = hit.snippet;
  item.appendChild(snippet);
  return item;
}

function renderBadge(concept: ConceptMatch): HTMLElement {
  const badge = document.createElement("span");
  badge.className =
    concept.via === "direct" ? "badge badge-direct" : "badge badge-expanded";
  badge.textContent = concept.label;
  badge.title = `${concept.via}, depth ${concept.depth}, strength ${concept.strength}`;
  return badge;
}
