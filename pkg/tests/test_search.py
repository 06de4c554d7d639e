"""Search behavior: cosine ranking, concept expansion, fallback,
evaluation conventions.  Cosine expectations are written out as
explicit formulas over ln() so the implementation has an independent
check."""
import math

import pytest

from ontosearch.indexer import (
    build_concept_index,
    build_inverted_index,
    build_lexicon,
    annotate,
)
from ontosearch.ontology import Ontology, SubClassOf
from ontosearch.reasoner import classify
from ontosearch.search import (
    Judgment,
    SearchEngine,
    UnknownDocId,
    evaluate,
    keyword_search,
    match_concepts,
    read_judgments,
    result_to_json,
    semantic_search,
)
from ontosearch.textprep import default_stopwords
from ontosearch.webcorpus.store import Document

BASE = "http://t.example/onto"


def _doc(doc_id: str, body: str) -> Document:
    return Document(doc_id=doc_id, url=f"http://x.test/{doc_id}", title=doc_id, body=body)


def _engine(ont: Ontology, docs: list[Document]) -> SearchEngine:
    stoplist = default_stopwords()
    index = build_inverted_index(docs, stoplist)
    lexicon = build_lexicon(ont, stoplist)
    concept_index = build_concept_index(annotate(docs, lexicon, stoplist), lexicon)
    return SearchEngine(
        docs={d.doc_id: d for d in docs},
        index=index,
        concept_index=concept_index,
        hierarchy=classify(ont),
        ontology=ont,
        stoplist=stoplist,
    )


# -- keyword cosine, hand-checked ----------------------------------------------

COSINE_DOCS = [
    _doc("a", "fever fever cough"),
    _doc("b", "fever cough cough cough"),
    _doc("c", "fever headache"),
    _doc("d", "cough headache headache"),
]


def test_cosine_scores_match_hand_computation():
    # N=4; df: fever 3, cough 3, headach 2
    L = math.log(4 / 3)
    H = math.log(2)
    qnorm = math.sqrt(L * L + H * H)
    expected = {
        "a": L / (qnorm * math.sqrt(5)),
        "b": 3 * L / (qnorm * math.sqrt(10)),
        "c": H * H / (qnorm * math.sqrt(L * L + H * H)),
        "d": (L * L + 2 * H * H) / (qnorm * math.sqrt(L * L + 4 * H * H)),
    }
    index = build_inverted_index(COSINE_DOCS)
    result = keyword_search(
        "headache cough",
        index=index,
        docs={d.doc_id: d for d in COSINE_DOCS},
        k=10,
    )
    assert [h.doc_id for h in result.hits] == ["d", "c", "b", "a"]
    for hit in result.hits:
        assert hit.score == pytest.approx(expected[hit.doc_id], abs=1e-9)


def test_keyword_k_bounds_results():
    index = build_inverted_index(COSINE_DOCS)
    docs = {d.doc_id: d for d in COSINE_DOCS}
    result = keyword_search("headache cough", index=index, docs=docs, k=2)
    assert [h.doc_id for h in result.hits] == ["d", "c"]


def test_keyword_ties_break_by_doc_id():
    docs = [_doc("b", "cough"), _doc("a", "cough"), _doc("z", "fever")]
    index = build_inverted_index(docs)
    result = keyword_search(
        "cough", index=index, docs={d.doc_id: d for d in docs}, k=10
    )
    assert [h.doc_id for h in result.hits] == ["a", "b"]
    assert result.hits[0].score == pytest.approx(result.hits[1].score, abs=1e-12)


def test_stopword_only_query_returns_nothing():
    index = build_inverted_index(COSINE_DOCS)
    docs = {d.doc_id: d for d in COSINE_DOCS}
    assert keyword_search("what is the", index=index, docs=docs).hits == ()


def test_snippet_prefers_sentence_with_evidence():
    docs = [
        _doc("a", "Unrelated opening line. Cough syrup helps. More filler."),
        _doc("b", "Something else entirely."),
    ]
    index = build_inverted_index(docs)
    result = keyword_search("cough", index=index, docs={d.doc_id: d for d in docs})
    assert result.hits[0].snippet == "Cough syrup helps."


# -- concept expansion -----------------------------------------------------------

def _fever_ontology() -> Ontology:
    ont = Ontology(base_iri=BASE)
    fever = ont.declare_class(BASE + "#Fever", "Fever")
    dengue = ont.declare_class(BASE + "#Dengue", "Dengue")
    typhoid = ont.declare_class(BASE + "#Typhoid", "Typhoid")
    flu = ont.declare_class(BASE + "#Flu", "Flu")
    influenza = ont.declare_class(BASE + "#Influenza", "Influenza")
    ont.declare_class(BASE + "#Headache", "Headache")
    ont.assert_axiom(SubClassOf(dengue, fever))
    ont.assert_axiom(SubClassOf(typhoid, fever))
    ont.assert_axiom(SubClassOf(flu, influenza))
    ont.assert_axiom(SubClassOf(influenza, flu))
    return ont


FEVER_DOCS = [
    _doc("dengue", "Dengue outbreak in the city. Dengue cases rise."),
    _doc("typhoid", "Typhoid spreads through water."),
    _doc("influenza", "Influenza season peaks in winter."),
    _doc("headache", "Headache relief methods."),
]


def test_superclass_query_reaches_subclass_documents():
    engine = _engine(_fever_ontology(), FEVER_DOCS)
    result = engine.search("fever", mode="semantic")
    assert [h.doc_id for h in result.hits] == ["dengue", "typhoid"]
    assert result.fallback is False
    for hit in result.hits:
        (match,) = hit.concepts
        assert match.via == "subclass-expansion"
        assert match.depth == 1


def test_same_query_finds_nothing_by_keyword():
    engine = _engine(_fever_ontology(), FEVER_DOCS)
    assert engine.search("fever", mode="keyword").hits == ()


def test_depth_discount_orders_direct_above_subclass():
    docs = FEVER_DOCS + [_doc("fever", "Fever management basics.")]
    engine = _engine(_fever_ontology(), docs)
    result = engine.search("fever", mode="semantic")
    # direct mention: 1.0 (+tie-break); dengue: strength 2 at depth 1 = 1.0;
    # cosine pushes the direct fever document first
    assert result.hits[0].doc_id == "fever"
    (match,) = result.hits[0].concepts
    assert match.via == "direct"
    assert match.depth == 0


def test_strong_subclass_mentions_outweigh_weak_direct_ones():
    docs = [
        _doc("weak", "Fever noted."),
        _doc("strong", "Dengue dengue dengue. Dengue again."),
    ]
    engine = _engine(_fever_ontology(), docs)
    result = engine.search("fever", mode="semantic")
    # strong: 4 subclass mentions / 2 = 2.0 beats weak: 1 direct = 1.0
    assert [h.doc_id for h in result.hits] == ["strong", "weak"]


def test_equivalent_classes_expand_at_depth_zero():
    engine = _engine(_fever_ontology(), FEVER_DOCS)
    result = engine.search("flu", mode="semantic")
    assert [h.doc_id for h in result.hits] == ["influenza"]
    (match,) = result.hits[0].concepts
    assert match.via == "direct"
    assert match.depth == 0


def test_cosine_breaks_concept_score_ties():
    # both docs carry one Dengue mention (concept score 0.5 for "fever
    # rest"); only the second also contains the non-concept query word
    docs = [
        _doc("quiet", "Dengue prevention. Stay safe inside."),
        _doc("resty", "Dengue prevention. Rest well and rest often."),
    ]
    engine = _engine(_fever_ontology(), docs)
    result = engine.search("fever rest", mode="semantic")
    assert [h.doc_id for h in result.hits] == ["resty", "quiet"]
    scores = {h.doc_id: h.score for h in result.hits}
    assert scores["quiet"] == pytest.approx(0.5, abs=1e-12)
    assert 0.5 < scores["resty"] <= 0.5 + 0.01 + 1e-12


def test_fallback_matches_keyword_ranking_exactly():
    engine = _engine(_fever_ontology(), FEVER_DOCS)
    semantic = engine.search("winter season", mode="semantic")
    keyword = engine.search("winter season", mode="keyword")
    assert semantic.fallback is True
    assert semantic.mode == "semantic"
    assert semantic.hits == keyword.hits


def test_match_concepts_counts_occurrences():
    engine = _engine(_fever_ontology(), FEVER_DOCS)
    counts = match_concepts("fever and more fever", engine.concept_index)
    assert counts == {BASE + "#Fever": 2}


def test_semantic_k_bounds_results():
    engine = _engine(_fever_ontology(), FEVER_DOCS)
    assert len(engine.search("fever", mode="semantic", k=1).hits) == 1


def test_unknown_mode_rejected():
    engine = _engine(_fever_ontology(), FEVER_DOCS)
    with pytest.raises(ValueError):
        engine.search("fever", mode="fuzzy")


def test_result_json_is_deterministic():
    engine = _engine(_fever_ontology(), FEVER_DOCS)
    one = result_to_json(engine.search("fever", mode="semantic"))
    two = result_to_json(engine.search("fever", mode="semantic"))
    assert one == two
    rebuilt = _engine(_fever_ontology(), list(reversed(FEVER_DOCS)))
    assert result_to_json(rebuilt.search("fever", mode="semantic")) == one


# -- evaluation -------------------------------------------------------------------

def test_evaluate_superclass_query_beats_keyword():
    engine = _engine(_fever_ontology(), FEVER_DOCS)
    judgments = [Judgment("fever", ("dengue", "typhoid"))]
    semantic = evaluate(engine, judgments, mode="semantic")
    keyword = evaluate(engine, judgments, mode="keyword")
    assert semantic.macro_recall == 1.0
    assert semantic.macro_precision == 1.0
    assert keyword.macro_recall == 0.0
    assert keyword.macro_precision == 0.0  # empty answer to answerable query


def test_evaluate_empty_retrieved_and_empty_relevant_is_perfect():
    engine = _engine(_fever_ontology(), FEVER_DOCS)
    report = evaluate(engine, [Judgment("zebra stampede", ())], mode="semantic")
    assert report.queries[0].precision == 1.0
    assert report.queries[0].recall == 1.0


def test_evaluate_macro_averages():
    engine = _engine(_fever_ontology(), FEVER_DOCS)
    judgments = [
        Judgment("fever", ("dengue", "typhoid")),
        Judgment("headache", ("headache", "influenza")),  # half relevant found
    ]
    report = evaluate(engine, judgments, mode="semantic")
    by_query = {q.query: q for q in report.queries}
    assert by_query["fever"].recall == 1.0
    assert by_query["headache"].recall == 0.5
    assert by_query["headache"].precision == 1.0
    assert report.macro_recall == pytest.approx(0.75)
    assert report.macro_precision == pytest.approx(1.0)


def test_evaluate_rejects_unknown_doc_ids():
    engine = _engine(_fever_ontology(), FEVER_DOCS)
    with pytest.raises(UnknownDocId):
        evaluate(engine, [Judgment("fever", ("missing-doc",))])


def test_evaluate_rejects_empty_judgments():
    engine = _engine(_fever_ontology(), FEVER_DOCS)
    with pytest.raises(ValueError):
        evaluate(engine, [])


def test_read_judgments_round_trip(tmp_path):
    path = tmp_path / "judgments.jsonl"
    path.write_text(
        '{"query": "fever", "relevant": ["b", "a"]}\n'
        "\n"
        '{"query": "rest", "relevant": []}\n',
        encoding="utf-8",
    )
    judgments = read_judgments(path)
    assert judgments == [
        Judgment("fever", ("a", "b")),
        Judgment("rest", ()),
    ]


def test_read_judgments_reports_bad_line(tmp_path):
    path = tmp_path / "judgments.jsonl"
    path.write_text('{"query": "x", "relevant": []}\nnot json\n', encoding="utf-8")
    with pytest.raises(ValueError, match="line 2"):
        read_judgments(path)


def test_eval_report_json_is_stable():
    engine = _engine(_fever_ontology(), FEVER_DOCS)
    judgments = [Judgment("fever", ("dengue", "typhoid"))]
    one = evaluate(engine, judgments, mode="semantic").to_json()
    two = evaluate(engine, judgments, mode="semantic").to_json()
    assert one == two
