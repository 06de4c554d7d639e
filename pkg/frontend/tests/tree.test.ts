import { describe, expect, it, vi } from "vitest";

import type { ClassNode, ClassTree } from "../src/api.js";
import { renderClassTree } from "../src/tree.js";

function node(label: string, extra: Partial<ClassNode> = {}): ClassNode {
  return {
    iri: `http://t.test#${label.replace(/ /g, "")}`,
    label,
    synonyms: [],
    equivalent: [],
    children: [],
    ...extra,
  };
}

const TREE: ClassTree = {
  roots: [
    node("Condition", {
      children: [
        node("Disease", {
          children: [
            node("Flu", {
              equivalent: [
                { iri: "http://t.test#Influenza", label: "Influenza", synonyms: [] },
              ],
            }),
          ],
        }),
        node("Fever", { synonyms: ["pyrexia"] }),
      ],
    }),
    node("Lifestyle"),
  ],
};

describe("renderClassTree", () => {
  it("renders branches as collapsible details and leaves as rows", () => {
    const el = renderClassTree(TREE, () => {});
    const branches = el.querySelectorAll("details.class-branch");
    expect(branches).toHaveLength(2); // Condition, Disease
    expect(el.querySelectorAll(".class-leaf")).toHaveLength(3); // Flu, Fever, Lifestyle
    const condition = branches[0] as HTMLDetailsElement;
    expect(condition.open).toBe(false);
    condition.open = true;
    expect(condition.querySelector(".class-children")).not.toBeNull();
  });

  it("shows an equivalence group as one row listing every label", () => {
    const el = renderClassTree(TREE, () => {});
    const labels = [...el.querySelectorAll("button.class-pick")].map(
      (b) => b.textContent,
    );
    expect(labels).toContain("Flu = Influenza");
    expect(labels).not.toContain("Influenza");
  });

  it("exposes synonyms as a tooltip", () => {
    const el = renderClassTree(TREE, () => {});
    const fever = [...el.querySelectorAll("button.class-pick")].find(
      (b) => b.textContent === "Fever",
    ) as HTMLButtonElement;
    expect(fever.title).toBe("synonyms: pyrexia");
  });

  it("clicking a class hands its own label to the callback", () => {
    const picked = vi.fn();
    const el = renderClassTree(TREE, picked);
    document.body.appendChild(el);
    const flu = [...el.querySelectorAll("button.class-pick")].find(
      (b) => b.textContent === "Flu = Influenza",
    ) as HTMLButtonElement;
    flu.click();
    expect(picked).toHaveBeenCalledWith("Flu");
    document.body.removeChild(el);
  });
});
