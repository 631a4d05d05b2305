"""Sparse and embedding retrieval, caching, and metrics."""

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle_helpers import (bm25_by_hand, precision_bruteforce,
                            recall_bruteforce)
from racglab.corpus import CodeDocument, Corpus
from racglab.errors import (DimensionMismatch, EmbeddingServiceError,
                            EmptySelection, MissingGolden, UnknownDoc)
from racglab.languages import Language
from racglab.retrieve import (EmbeddingCache, EmbeddingClient, Query,
                              RetrievalResult, build_index, bm25_score,
                              embed_search, oracle_retrieve, precision_at_k,
                              recall_at_k, search, tokenize_for_retrieval)


def _corpus(texts: dict[str, str]) -> Corpus:
    return Corpus(documents=[
        CodeDocument(doc_id, Language.PYTHON, code, f"fam-{doc_id}")
        for doc_id, code in texts.items()])


def _query(text: str) -> Query:
    return Query("q", text, Language.PYTHON, Language.PYTHON)


class TestTokenizer:
    def test_camel_case_split(self):
        assert tokenize_for_retrieval("parseHTTPResponse") == [
            "parsehttpresponse", "parse", "http", "response"]

    def test_snake_case_split(self):
        assert tokenize_for_retrieval("max_sum") == ["max_sum", "max", "sum"]

    def test_simple_word_not_doubled(self):
        assert tokenize_for_retrieval("total") == ["total"]

    def test_punctuation_splits(self):
        assert tokenize_for_retrieval("a.b(c)") == ["a", "b", "c"]

    def test_digits_kept(self):
        assert "utf8" in tokenize_for_retrieval("utf8")


class TestBM25:
    def test_single_doc_hand_value(self):
        corpus = _corpus({"d1": "alpha beta gamma"})
        index = build_index(corpus, Language.PYTHON)
        score = bm25_score(index, ["alpha"], "d1")
        assert score == pytest.approx(
            bm25_by_hand(n_docs=1, df=1, tf=1, doc_len=3, avg_len=3.0),
            abs=1e-12)
        assert score == pytest.approx(0.2877, abs=1e-4)

    def test_zero_overlap_scores_zero(self):
        corpus = _corpus({"d1": "alpha beta"})
        index = build_index(corpus, Language.PYTHON)
        assert bm25_score(index, ["zeta"], "d1") == 0.0

    def test_unknown_doc_raises(self):
        index = build_index(_corpus({"d1": "alpha"}), Language.PYTHON)
        with pytest.raises(UnknownDoc):
            bm25_score(index, ["alpha"], "ghost")

    def test_higher_tf_scores_higher(self):
        corpus = _corpus({"d1": "alpha alpha beta pad", "d2": "alpha beta pad x"})
        index = build_index(corpus, Language.PYTHON)
        assert bm25_score(index, ["alpha"], "d1") > bm25_score(
            index, ["alpha"], "d2")

    def test_search_orders_and_truncates(self):
        corpus = _corpus({"d1": "alpha beta", "d2": "alpha alpha",
                          "d3": "gamma delta"})
        index = build_index(corpus, Language.PYTHON)
        result = search(index, _query("alpha"), k=2)
        assert result.doc_ids == ["d2", "d1"]

    def test_ties_break_by_doc_id(self):
        corpus = _corpus({"b": "same text", "a": "same text", "c": "same text"})
        index = build_index(corpus, Language.PYTHON)
        result = search(index, _query("same"), k=3)
        assert result.doc_ids == ["a", "b", "c"]

    def test_k_larger_than_corpus(self):
        corpus = _corpus({"d1": "alpha"})
        index = build_index(corpus, Language.PYTHON)
        assert len(search(index, _query("alpha"), k=10).doc_ids) == 1

    def test_empty_language_raises(self):
        with pytest.raises(EmptySelection):
            build_index(_corpus({"d1": "x"}), Language.JAVA)

    def test_term_frequencies(self):
        index = build_index(_corpus({"d1": "alpha alpha beta"}),
                            Language.PYTHON)
        assert index.term_frequencies("d1") == {"alpha": 2, "beta": 1}
        with pytest.raises(UnknownDoc):
            index.term_frequencies("ghost")


class TestEmbedding:
    def test_embed_round_trip(self, mock_server):
        client = EmbeddingClient(mock_server.endpoint)
        vectors = client.embed(["one", "two"])
        assert vectors.shape == (2, 8)
        again = client.embed(["one"])
        assert np.allclose(vectors[0], again[0])

    def test_service_error_surfaces_status(self, mock_server):
        mock_server.set_failure(503)
        client = EmbeddingClient(mock_server.endpoint)
        with pytest.raises(EmbeddingServiceError) as err:
            client.embed(["text"])
        assert err.value.status == 503

    def test_batching_covers_all_texts(self, mock_server):
        client = EmbeddingClient(mock_server.endpoint, batch_size=3)
        vectors = client.embed([f"text {i}" for i in range(10)])
        assert vectors.shape[0] == 10
        assert len(mock_server.requests) == 4

    def test_embed_search_finds_same_text(self, mock_server,
                                          self_retrieval_corpus):
        client = EmbeddingClient(mock_server.endpoint)
        doc = self_retrieval_corpus.documents[4]
        query = Query(doc.family_id, doc.nl_comment.lstrip("# "),
                      Language.PYTHON, Language.PYTHON)
        result = embed_search(client, self_retrieval_corpus, query, k=1)
        assert result.doc_ids == [doc.doc_id]

    def test_cache_save_load_round_trip(self, tmp_path):
        cache = EmbeddingCache()
        rng = np.random.default_rng(0)
        for i in range(5):
            cache.put(f"d{i}", rng.random(16, dtype=np.float32))
        path = tmp_path / "vectors.bin"
        cache.save(path)
        loaded = EmbeddingCache.load(path)
        assert set(loaded.vectors) == set(cache.vectors)
        for key in cache.vectors:
            assert np.array_equal(loaded.vectors[key], cache.vectors[key])

    def test_cache_is_write_once(self):
        cache = EmbeddingCache()
        cache.put("d", np.ones(4))
        cache.put("d", np.zeros(4))
        assert cache.vectors["d"].sum() == 4

    def test_mixed_dimensions_rejected_on_save(self, tmp_path):
        cache = EmbeddingCache()
        cache.put("a", np.ones(4))
        cache.put("b", np.ones(5))
        with pytest.raises(DimensionMismatch):
            cache.save(tmp_path / "bad.bin")


class TestOracle:
    def test_oracle_returns_golden(self, task_corpus):
        query = Query("fam007", "anything", Language.PYTHON, Language.PYTHON)
        assert oracle_retrieve(task_corpus, query).doc_id == "doc-fam007"

    def test_missing_golden_raises(self, task_corpus):
        query = Query("no-such-family", "x", Language.PYTHON, Language.PYTHON)
        with pytest.raises(MissingGolden):
            oracle_retrieve(task_corpus, query)


class TestMetrics:
    def test_against_bruteforce_randomized(self):
        rng = random.Random(1234)
        ids = [f"d{i}" for i in range(30)]
        for _ in range(1000):
            k = rng.randint(1, 10)
            ranked = rng.sample(ids, k=rng.randint(k, 20))
            golden = set(rng.sample(ids, k=rng.randint(1, 8)))
            result = RetrievalResult("q", tuple((d, 0.0) for d in ranked), k)
            assert precision_at_k(result, golden, k) == \
                precision_bruteforce(ranked, golden, k)
            assert recall_at_k(result, golden, len(golden), k) == \
                recall_bruteforce(ranked, golden, len(golden), k)

    def test_domain_checks(self):
        result = RetrievalResult("q", (("d", 1.0),), 1)
        with pytest.raises(ValueError):
            precision_at_k(result, {"d"}, 0)
        with pytest.raises(ValueError):
            recall_at_k(result, {"d"}, 0, 1)


@settings(max_examples=80, deadline=None)
@given(st.text(alphabet=st.characters(
    whitelist_categories=("Ll", "Lu", "Nd"), max_codepoint=127),
    min_size=0, max_size=30))
def test_tokenizer_terms_are_lowercase_substrings(word):
    for term in tokenize_for_retrieval(word):
        assert term == term.lower()
        assert term in word.lower()
