"""Ontology-backed semantic search over a crawled web corpus."""

__version__ = "0.1.0"
