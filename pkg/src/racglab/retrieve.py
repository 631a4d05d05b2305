"""Sparse (Okapi BM25) and embedding-based retrieval, the oracle retriever,
and retrieval-quality metrics."""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import requests

from .corpus import CodeDocument, Corpus, document_text
from .errors import (DimensionMismatch, EmbeddingServiceError, EmptySelection,
                     MissingGolden, UnknownDoc)
from .languages import Language

BM25_K1 = 1.2
BM25_B = 0.75

_WORD = re.compile(r"[A-Za-z0-9_]+")
_CAMEL = re.compile(r"[A-Z]+(?=[A-Z][a-z0-9])|[A-Z]?[a-z0-9]+|[A-Z]+")


@dataclass(frozen=True)
class Query:
    family_id: str
    text: str
    target_language: Language
    source_language: Language


@dataclass(frozen=True)
class RetrievalResult:
    query_family: str
    ranked: tuple[tuple[str, float], ...]
    k: int

    @property
    def doc_ids(self) -> list[str]:
        return [doc_id for doc_id, _ in self.ranked]


def tokenize_for_retrieval(text: str) -> list[str]:
    """Lowercased terms: each word plus its camelCase / snake_case parts."""
    terms: list[str] = []
    for word in _WORD.findall(text):
        compound = word.lower()
        terms.append(compound)
        parts = []
        for piece in word.split("_"):
            parts.extend(m.group(0).lower() for m in _CAMEL.finditer(piece))
        if len(parts) > 1 or (parts and parts[0] != compound):
            terms.extend(parts)
    return terms


@dataclass
class SparseIndex:
    postings: dict[str, list[tuple[str, int]]]
    doc_lengths: dict[str, int]
    avg_doc_length: float
    doc_count: int
    language: Language

    def term_frequencies(self, doc_id: str) -> dict[str, int]:
        if doc_id not in self.doc_lengths:
            raise UnknownDoc(doc_id)
        return {term: tf for term, posting in self.postings.items()
                for d, tf in posting if d == doc_id}


def build_index(corpus: Corpus, language: Language) -> SparseIndex:
    docs = corpus.in_language(language)
    if not docs:
        raise EmptySelection(f"no documents in language {language}")
    postings: dict[str, list[tuple[str, int]]] = {}
    doc_lengths: dict[str, int] = {}
    for doc in docs:
        terms = tokenize_for_retrieval(document_text(doc, corpus.setting_variant))
        doc_lengths[doc.doc_id] = len(terms)
        for term, tf in Counter(terms).items():
            postings.setdefault(term, []).append((doc.doc_id, tf))
    avg = sum(doc_lengths.values()) / len(doc_lengths)
    return SparseIndex(postings=postings, doc_lengths=doc_lengths,
                       avg_doc_length=avg, doc_count=len(docs),
                       language=language)


def _idf(index: SparseIndex, term: str) -> float:
    df = len(index.postings.get(term, ()))
    return math.log(1.0 + (index.doc_count - df + 0.5) / (df + 0.5))


def bm25_score(index: SparseIndex, query_terms: list[str], doc_id: str) -> float:
    if doc_id not in index.doc_lengths:
        raise UnknownDoc(doc_id)
    length_norm = 1.0 - BM25_B + BM25_B * (
        index.doc_lengths[doc_id] / index.avg_doc_length)
    score = 0.0
    for term in set(query_terms):
        posting = index.postings.get(term)
        if not posting:
            continue
        tf = next((tf for d, tf in posting if d == doc_id), 0)
        if tf == 0:
            continue
        score += _idf(index, term) * tf * (BM25_K1 + 1) / (tf + BM25_K1 * length_norm)
    return score


def search(index: SparseIndex, query: Query, k: int = 3) -> RetrievalResult:
    """Top-k by BM25; ties (including zero scores) broken by ascending
    doc_id, so exactly min(k, doc_count) results come back."""
    if k < 1:
        raise ValueError("k must be >= 1")
    terms = tokenize_for_retrieval(query.text)
    scored = [(doc_id, bm25_score(index, terms, doc_id))
              for doc_id in index.doc_lengths]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return RetrievalResult(query_family=query.family_id,
                           ranked=tuple(scored[:k]), k=k)


class EmbeddingClient:
    """HTTP client for the embedding service wire protocol."""

    def __init__(self, endpoint: str, api_key: str | None = None,
                 timeout_s: float = 60.0, batch_size: int = 64):
        self.endpoint = endpoint.rstrip("/")
        self.api_key = api_key
        self.timeout_s = timeout_s
        self.batch_size = batch_size

    def embed(self, texts: list[str]) -> np.ndarray:
        vectors: list[list[float]] = []
        for start in range(0, len(texts), self.batch_size):
            batch = texts[start:start + self.batch_size]
            headers = {}
            if self.api_key:
                headers["Authorization"] = f"Bearer {self.api_key}"
            try:
                resp = requests.post(f"{self.endpoint}/embed",
                                     json={"texts": batch}, headers=headers,
                                     timeout=self.timeout_s)
            except requests.RequestException as exc:
                raise EmbeddingServiceError(0, str(exc))
            if resp.status_code // 100 != 2:
                try:
                    detail = resp.json().get("error", "")
                except ValueError:
                    detail = resp.text[:200]
                raise EmbeddingServiceError(resp.status_code, detail)
            vectors.extend(resp.json()["vectors"])
        dims = {len(v) for v in vectors}
        if len(dims) > 1:
            raise DimensionMismatch(f"mixed vector lengths: {sorted(dims)}")
        return np.asarray(vectors, dtype=np.float32)


@dataclass
class EmbeddingCache:
    """Write-once vector store keyed by doc_id."""
    vectors: dict[str, np.ndarray] = field(default_factory=dict)

    def put(self, doc_id: str, vector: np.ndarray) -> None:
        if doc_id not in self.vectors:
            self.vectors[doc_id] = np.asarray(vector, dtype=np.float32)

    def save(self, path: str | Path) -> None:
        doc_ids = sorted(self.vectors)
        dim = len(self.vectors[doc_ids[0]]) if doc_ids else 0
        header = json.dumps({"dim": dim, "doc_ids": doc_ids}).encode("utf-8")
        with Path(path).open("wb") as fh:
            fh.write(header + b"\n")
            for doc_id in doc_ids:
                vec = self.vectors[doc_id]
                if len(vec) != dim:
                    raise DimensionMismatch(
                        f"{doc_id}: {len(vec)} != {dim}")
                fh.write(vec.astype("<f4").tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "EmbeddingCache":
        with Path(path).open("rb") as fh:
            header = json.loads(fh.readline().decode("utf-8"))
            dim = header["dim"]
            cache = cls()
            for doc_id in header["doc_ids"]:
                row = np.frombuffer(fh.read(4 * dim), dtype="<f4")
                if len(row) != dim:
                    raise DimensionMismatch(f"truncated row for {doc_id}")
                cache.vectors[doc_id] = row
        return cache


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def embed_corpus(client: EmbeddingClient, corpus: Corpus, language: Language,
                 cache: EmbeddingCache | None = None) -> EmbeddingCache:
    cache = cache or EmbeddingCache()
    docs = [d for d in corpus.in_language(language)
            if d.doc_id not in cache.vectors]
    if docs:
        vectors = client.embed(
            [document_text(d, corpus.setting_variant) for d in docs])
        for doc, vec in zip(docs, vectors):
            cache.put(doc.doc_id, vec)
    return cache


def embed_search(client: EmbeddingClient, corpus: Corpus, query: Query,
                 k: int = 3, cache: EmbeddingCache | None = None
                 ) -> RetrievalResult:
    """Rank by cosine similarity to the query vector. Document vectors are
    computed once and cached; tie-breaking matches `search`."""
    if k < 1:
        raise ValueError("k must be >= 1")
    docs = corpus.in_language(query.source_language)
    if not docs:
        raise EmptySelection(f"no documents in language {query.source_language}")
    cache = embed_corpus(client, corpus, query.source_language, cache)
    qvec = client.embed([query.text])[0]
    dims = {len(cache.vectors[d.doc_id]) for d in docs} | {len(qvec)}
    if len(dims) > 1:
        raise DimensionMismatch(f"mixed vector lengths: {sorted(dims)}")
    scored = [(d.doc_id, cosine_similarity(qvec, cache.vectors[d.doc_id]))
              for d in docs]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return RetrievalResult(query_family=query.family_id,
                           ranked=tuple(scored[:k]), k=k)


def oracle_retrieve(corpus: Corpus, query: Query) -> CodeDocument:
    key = (query.family_id, query.source_language)
    doc_id = corpus.golden.get(key)
    if doc_id is None or doc_id not in corpus:
        raise MissingGolden(query.family_id, query.source_language.value)
    return corpus.get(doc_id)


def precision_at_k(result: RetrievalResult, golden_ids: set[str],
                   k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    top = set(result.doc_ids[:k])
    return len(top & golden_ids) / k


def recall_at_k(result: RetrievalResult, golden_ids: set[str],
                total_golden: int, k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    if total_golden < 1:
        raise ValueError("total_golden must be >= 1")
    top = set(result.doc_ids[:k])
    return len(top & golden_ids) / total_golden
