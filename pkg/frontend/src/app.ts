import type { SearchMode, SearchService } from "./api.js";
import { RequestSequencer } from "./latest.js";
import { renderPanel } from "./panels.js";
import type { PanelState } from "./panels.js";
import { renderClassTree } from "./tree.js";

export interface App {
  queryInput: HTMLInputElement;
  /** Resolves once both panels have settled for this query. */
  runSearch(raw: string): Promise<void>;
  loadTree(): Promise<void>;
}

const MODES: readonly SearchMode[] = ["semantic", "keyword"];

/** Builds the whole UI under `root` and wires it to `client`. */
export function mountApp(root: HTMLElement, client: SearchService): App {
  root.replaceChildren();

  const form = document.createElement("form");
  form.className = "search-form";
  const input = document.createElement("input");
  input.type = "search";
  input.name = "q";
  input.placeholder = "e.g. medicine for the headache";
  form.appendChild(input);
  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Search";
  form.appendChild(submit);
  root.appendChild(form);

  const hint = document.createElement("p");
  hint.className = "hint";
  hint.setAttribute("role", "status");
  root.appendChild(hint);

  const columns = document.createElement("div");
  columns.className = "columns";
  root.appendChild(columns);

  const bodies = {} as Record<SearchMode, HTMLElement>;
  for (const mode of MODES) {
    const panel = document.createElement("section");
    panel.className = "panel";
    panel.id = `panel-${mode}`;
    const title = document.createElement("h2");
    title.textContent = mode === "semantic" ? "Semantic" : "Keyword";
    panel.appendChild(title);
    const body = document.createElement("div");
    body.className = "panel-body";
    panel.appendChild(body);
    columns.appendChild(panel);
    bodies[mode] = body;
    setPanel(mode, { kind: "idle" });
  }

  const browser = document.createElement("aside");
  browser.className = "browser";
  const browserTitle = document.createElement("h2");
  browserTitle.textContent = "Class hierarchy";
  browser.appendChild(browserTitle);
  const treeSlot = document.createElement("div");
  treeSlot.className = "tree-slot";
  browser.appendChild(treeSlot);
  columns.appendChild(browser);

  const sequencers: Record<SearchMode, RequestSequencer> = {
    semantic: new RequestSequencer(),
    keyword: new RequestSequencer(),
  };
  let lastQuery = "";

  function setPanel(mode: SearchMode, state: PanelState): void {
    renderPanel(bodies[mode], state, () => {
      void searchOne(mode, lastQuery);
    });
  }

  async function searchOne(mode: SearchMode, query: string): Promise<void> {
    const token = sequencers[mode].next();
    setPanel(mode, { kind: "loading", query });
    try {
      const response = await client.search(query, mode);
      if (!sequencers[mode].isCurrent(token)) {
        return; // a newer query owns this panel now
      }
      setPanel(mode, { kind: "result", response });
    } catch (error) {
      if (!sequencers[mode].isCurrent(token)) {
        return;
      }
      const message = error instanceof Error ? error.message : String(error);
      setPanel(mode, { kind: "error", message });
    }
  }

  async function runSearch(raw: string): Promise<void> {
    const query = raw.trim();
    if (!query) {
      hint.textContent = "Type a query first.";
      return;
    }
    hint.textContent = "";
    lastQuery = query;
    await Promise.all(MODES.map((mode) => searchOne(mode, query)));
  }

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void runSearch(input.value);
  });

  async function loadTree(): Promise<void> {
    treeSlot.replaceChildren();
    const loading = document.createElement("p");
    loading.className = "note";
    loading.textContent = "Loading class tree…";
    treeSlot.appendChild(loading);
    try {
      const tree = await client.classTree();
      treeSlot.replaceChildren(
        renderClassTree(tree, (label) => {
          input.value = label;
          input.focus();
        }),
      );
    } catch (error) {
      const banner = document.createElement("div");
      banner.className = "error-banner";
      banner.setAttribute("role", "alert");
      const text = document.createElement("span");
      text.textContent = error instanceof Error ? error.message : String(error);
      banner.appendChild(text);
      const retry = document.createElement("button");
      retry.type = "button";
      retry.className = "retry";
      retry.textContent = "Retry";
      retry.addEventListener("click", () => {
        void loadTree();
      });
      banner.appendChild(retry);
      treeSlot.replaceChildren(banner);
    }
  }

  return { queryInput: input, runSearch, loadTree };
}
