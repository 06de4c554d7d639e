"""Command-line entry point.

    ontosearch pipeline run --config pipeline.toml
    ontosearch pipeline stage index --config pipeline.toml
    ontosearch pipeline status --artifacts DIR
    ontosearch search --q "medicine for headache" --artifacts DIR
    ontosearch eval --judgments q.jsonl --artifacts DIR
    ontosearch classify --artifacts DIR | --ontology file.ont
    ontosearch serve --artifacts DIR --port 8080
    ontosearch propose-synonyms --artifacts DIR

Exit codes: 0 success, 1 runtime failure (message on stderr), 2 usage.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .authoring import OntologyParseError, load_ontology
from .ontology import OntologyError
from .pipeline import (
    PipelineConfig,
    PipelineError,
    STAGES,
    load_classification,
    load_engine,
    run_all,
    run_stage,
    status,
)
from .reasoner import check_consistency, classify
from .search import UnknownDocId, evaluate, read_judgments, result_to_json
from .server import class_tree, serve
from .webcorpus.store import IoFailure

_FAILURES = (
    PipelineError,
    OntologyError,
    OntologyParseError,
    IoFailure,
    UnknownDocId,
    OSError,
    ValueError,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ontosearch",
        description="ontology-backed semantic search over a crawled corpus",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pipe = sub.add_parser("pipeline", help="build or inspect artifacts")
    pipe_sub = pipe.add_subparsers(dest="pipeline_command", required=True)

    run = pipe_sub.add_parser("run", help="run every stage in order")
    run.add_argument("--config", required=True, help="pipeline TOML file")
    run.add_argument("--artifacts", help="override the artifacts directory")

    stage = pipe_sub.add_parser("stage", help="run one stage")
    stage.add_argument("name", choices=STAGES)
    stage.add_argument("--config", required=True)
    stage.add_argument("--artifacts", help="override the artifacts directory")

    stat = pipe_sub.add_parser("status", help="report artifact states")
    stat.add_argument("--config")
    stat.add_argument("--artifacts")

    search = sub.add_parser("search", help="query built artifacts")
    search.add_argument("--q", required=True, help="query text")
    search.add_argument("--mode", choices=("semantic", "keyword"), default="semantic")
    search.add_argument("--k", type=int, default=10)
    search.add_argument("--artifacts", required=True)

    ev = sub.add_parser("eval", help="precision/recall for judged queries")
    ev.add_argument("--judgments", required=True, help="JSONL with query + relevant ids")
    ev.add_argument("--artifacts", required=True)
    ev.add_argument("--k", type=int, default=10)

    cls = sub.add_parser("classify", help="print the class tree and consistency report")
    group = cls.add_mutually_exclusive_group(required=True)
    group.add_argument("--artifacts")
    group.add_argument("--ontology", help="classify an ontology source file directly")

    srv = sub.add_parser("serve", help="start the HTTP API")
    srv.add_argument("--artifacts", required=True)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8080)

    prop = sub.add_parser(
        "propose-synonyms",
        help="suggest high-weight corpus terms per concept (report only)",
    )
    prop.add_argument("--artifacts", required=True)
    prop.add_argument("--per-concept", type=int, default=5)

    return parser


def _cmd_pipeline(args) -> int:
    if args.pipeline_command == "status":
        if args.config:
            config = PipelineConfig.from_toml(args.config)
            artifacts = args.artifacts or config.artifacts_dir
        elif args.artifacts:
            artifacts = args.artifacts
        else:
            print("status needs --config or --artifacts", file=sys.stderr)
            return 2
        print(json.dumps(status(Path(artifacts)), sort_keys=True, indent=2))
        return 0
    overrides = {}
    if args.artifacts:
        overrides["artifacts_dir"] = Path(args.artifacts).resolve()
    config = PipelineConfig.from_toml(args.config, overrides)
    if args.pipeline_command == "run":
        run_all(config)
        print(json.dumps(status(config.artifacts_dir), sort_keys=True, indent=2))
    else:
        run_stage(config, args.name)
        print(f"stage {args.name} complete")
    return 0


def _cmd_search(args) -> int:
    engine = load_engine(args.artifacts)
    result = engine.search(args.q, mode=args.mode, k=args.k)
    sys.stdout.write(result_to_json(result))
    return 0


def _cmd_eval(args) -> int:
    engine = load_engine(args.artifacts)
    judgments = read_judgments(Path(args.judgments))
    semantic = evaluate(engine, judgments, mode="semantic", k=args.k)
    keyword = evaluate(engine, judgments, mode="keyword", k=args.k)
    combined = {
        "semantic": json.loads(semantic.to_json()),
        "keyword": json.loads(keyword.to_json()),
        "recall_difference": semantic.macro_recall - keyword.macro_recall,
        "precision_difference": semantic.macro_precision - keyword.macro_precision,
    }
    print(json.dumps(combined, sort_keys=True, indent=2))
    return 0


def _print_tree(node: dict, depth: int, out) -> None:
    label = node["label"]
    extras = []
    if node["equivalent"]:
        extras.append("= " + ", ".join(e["label"] for e in node["equivalent"]))
    if node["synonyms"]:
        extras.append("syn: " + ", ".join(node["synonyms"]))
    suffix = f"  ({'; '.join(extras)})" if extras else ""
    out.write("  " * depth + label + suffix + "\n")
    for child in node["children"]:
        _print_tree(child, depth + 1, out)


def _cmd_classify(args) -> int:
    if args.ontology:
        ont = load_ontology(Path(args.ontology))
        hierarchy = classify(ont)
    else:
        hierarchy, ont = load_classification(args.artifacts)
    tree = class_tree(hierarchy, ont)
    for root in tree["roots"]:
        _print_tree(root, 0, sys.stdout)
    report = check_consistency(ont, hierarchy)
    sys.stdout.write(report.to_json())
    return 0


def _cmd_serve(args) -> int:
    engine = load_engine(args.artifacts)
    serve(engine, host=args.host, port=args.port)
    return 0


def _cmd_propose_synonyms(args) -> int:
    engine = load_engine(args.artifacts)
    index = engine.index
    lexicon = engine.concept_index.lexicon
    known_stems = {s for key in lexicon.entries for s in key.split(" ")}
    proposals = []
    for iri in sorted(engine.concept_index.postings):
        doc_ids = [doc_id for doc_id, _ in engine.concept_index.docs_for(iri)]
        scores: dict[str, float] = {}
        for term in index.postings:
            if term in known_stems:
                continue
            for doc_id in doc_ids:
                weight = index.weight(term, doc_id)
                if weight > 0:
                    scores[term] = scores.get(term, 0.0) + weight
        top = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))[: args.per_concept]
        cls = engine.ontology.classes.get(iri)
        proposals.append(
            {
                "iri": iri,
                "label": cls.label if cls else iri,
                "proposals": [
                    {"stem": term, "weight": round(weight, 6)} for term, weight in top
                ],
            }
        )
    print(json.dumps({"concepts": proposals}, sort_keys=True, indent=2))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "pipeline": _cmd_pipeline,
        "search": _cmd_search,
        "eval": _cmd_eval,
        "classify": _cmd_classify,
        "serve": _cmd_serve,
        "propose-synonyms": _cmd_propose_synonyms,
    }
    try:
        return handlers[args.command](args)
    except _FAILURES as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
