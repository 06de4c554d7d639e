import type { ClassNode, ClassTree } from "./api.js";

/** Collapsible class hierarchy browser.
 *
 * Branch nodes are <details> elements, leaves plain rows; every class
 * gets a button that hands its label to `onPick` (the app puts it into
 * the query box). An equivalence group arrives as one node and is shown
 * as one row listing all its labels.
 */
export function renderClassTree(
  tree: ClassTree,
  onPick: (label: string) => void,
): HTMLElement {
  const container = document.createElement("div");
  container.className = "class-tree";
  for (const node of tree.roots) {
    container.appendChild(renderNode(node, onPick));
  }
  return container;
}

function displayLabel(node: ClassNode): string {
  return [node.label, ...node.equivalent.map((e) => e.label)].join(" = ");
}

function pickButton(
  node: ClassNode,
  onPick: (label: string) => void,
): HTMLButtonElement {
  const button = document.createElement("button");
  button.type = "button";
  button.className = "class-pick";
  button.textContent = displayLabel(node);
  if (node.synonyms.length > 0) {
    button.title = `synonyms: ${node.synonyms.join(", ")}`;
  }
  button.addEventListener("click", (event) => {
    event.preventDefault(); // don't toggle the surrounding <details>
    onPick(node.label);
  });
  return button;
}

function renderNode(
  node: ClassNode,
  onPick: (label: string) => void,
): HTMLElement {
  if (node.children.length === 0) {
    const leaf = document.createElement("div");
    leaf.className = "class-leaf";
    leaf.appendChild(pickButton(node, onPick));
    return leaf;
  }
  const branch = document.createElement("details");
  branch.className = "class-branch";
  const summary = document.createElement("summary");
  summary.appendChild(pickButton(node, onPick));
  branch.appendChild(summary);
  const children = document.createElement("div");
  children.className = "class-children";
  for (const child of node.children) {
    children.appendChild(renderNode(child, onPick));
  }
  branch.appendChild(children);
  return branch;
}
