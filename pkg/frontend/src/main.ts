import { ApiClient } from "./api.js";
import { mountApp } from "./app.js";

// ?api=http://host:port points the UI at a service on another origin;
// with no parameter the page's own origin is used.
const base = new URLSearchParams(window.location.search).get("api") ?? "";
const root = document.getElementById("app");
if (root) {
  const app = mountApp(root, new ApiClient(base));
  void app.loadTree();
}
