"""A small JSON API over a SearchEngine, on the standard library's
threading HTTP server.

Endpoints:
    GET /health            -> {"status": "ok", ...}
    GET /search            -> ranked hits; params q (required),
                              mode=semantic|keyword (default semantic),
                              k (default 10)
    GET /ontology/classes  -> class tree with equivalence groups
                              flattened into single nodes

Every response carries CORS headers so a browser frontend served from
another origin can call the API directly.
"""
from __future__ import annotations

import json
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlsplit

from .ontology import OWL_THING_IRI, Ontology
from .reasoner import InferredHierarchy
from .search import SearchEngine, result_to_json

__all__ = ["make_server", "serve", "class_tree"]


def class_tree(hierarchy: InferredHierarchy, ontology: Ontology) -> dict:
    """Nested class nodes rooted at the top of the hierarchy.  Each
    equivalence group collapses to one node keyed by its smallest IRI,
    with the other members listed under "equivalent"."""

    def describe(iri: str) -> dict:
        cls = ontology.classes.get(iri)
        return {
            "iri": iri,
            "label": cls.label if cls else iri.rsplit("#", 1)[-1],
            "synonyms": list(cls.synonyms) if cls else [],
        }

    children_of: dict[str, list[tuple[str, ...]]] = {}
    for group in hierarchy.equiv_groups:
        rep = group[0]
        if rep == OWL_THING_IRI:
            continue
        parents = hierarchy.direct_parents.get(rep, frozenset())
        for parent_rep in parents or {OWL_THING_IRI}:
            children_of.setdefault(parent_rep, []).append(group)

    def node(group: tuple[str, ...]) -> dict:
        rep = group[0]
        payload = describe(rep)
        payload["equivalent"] = [describe(iri) for iri in group[1:]]
        child_groups = sorted(children_of.get(rep, []), key=lambda g: g[0])
        payload["children"] = [node(g) for g in child_groups]
        return payload

    roots = sorted(children_of.get(OWL_THING_IRI, []), key=lambda g: g[0])
    return {"roots": [node(g) for g in roots]}


class _Handler(BaseHTTPRequestHandler):
    engine: SearchEngine  # set by make_server on the handler subclass

    protocol_version = "HTTP/1.1"

    def log_message(self, format, *args):  # noqa: A002 - stdlib signature
        pass

    def _send(self, status: int, body: str) -> None:
        data = body.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()
        self.wfile.write(data)

    def _send_error(self, status: int, message: str) -> None:
        self._send(status, json.dumps({"error": message}) + "\n")

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self):
        url = urlsplit(self.path)
        params = parse_qs(url.query)
        if url.path == "/health":
            self._send(
                200,
                json.dumps(
                    {
                        "status": "ok",
                        "doc_count": len(self.engine.docs),
                        "class_count": len(self.engine.ontology.classes),
                    },
                    sort_keys=True,
                )
                + "\n",
            )
        elif url.path == "/search":
            self._handle_search(params)
        elif url.path == "/ontology/classes":
            self._send(
                200,
                json.dumps(
                    class_tree(self.engine.hierarchy, self.engine.ontology),
                    sort_keys=True,
                )
                + "\n",
            )
        else:
            self._send_error(404, f"no such endpoint: {url.path}")

    def _handle_search(self, params: dict[str, list[str]]) -> None:
        queries = params.get("q", [])
        if not queries or not queries[0].strip():
            self._send_error(400, "missing required parameter: q")
            return
        mode = params.get("mode", ["semantic"])[0]
        if mode not in ("semantic", "keyword"):
            self._send_error(400, f"unknown mode: {mode}")
            return
        raw_k = params.get("k", ["10"])[0]
        try:
            k = int(raw_k)
        except ValueError:
            self._send_error(400, f"k must be an integer, got {raw_k!r}")
            return
        if k < 1:
            self._send_error(400, "k must be at least 1")
            return
        started = time.perf_counter()
        result = self.engine.search(queries[0], mode=mode, k=k)
        took_ms = (time.perf_counter() - started) * 1000.0
        payload = json.loads(result_to_json(result))
        payload["took_ms"] = round(took_ms, 3)
        self._send(200, json.dumps(payload, sort_keys=True) + "\n")


def make_server(
    engine: SearchEngine, host: str = "127.0.0.1", port: int = 0
) -> ThreadingHTTPServer:
    """Bound but not yet serving; port 0 picks a free port (see
    server.server_address)."""
    handler = type("BoundHandler", (_Handler,), {"engine": engine})
    return ThreadingHTTPServer((host, port), handler)


def serve(engine: SearchEngine, host: str = "127.0.0.1", port: int = 8080) -> None:
    server = make_server(engine, host, port)
    address = server.server_address
    print(f"listening on http://{address[0]}:{address[1]}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
