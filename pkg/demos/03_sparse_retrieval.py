"""Index a corpus with Okapi BM25, run a few queries, and score retrieval
quality against golden annotations.

Run:  python3 demos/03_sparse_retrieval.py
"""

from racglab import (CodeDocument, Corpus, Query, build_index, precision_at_k,
                     recall_at_k, search, tokenize_for_retrieval)
from racglab.languages import Language

print("query tokenization splits compounds:")
print("  parseHTTPResponse ->", tokenize_for_retrieval("parseHTTPResponse"))
print("  max_sum           ->", tokenize_for_retrieval("max_sum"))
print()

snippets = {
    "sort-001": ("# merge sort over a list\n"
                 "def merge_sort(items): ..."),
    "sort-002": ("# quick sort with median pivot\n"
                 "def quick_sort(items): ..."),
    "graph-001": ("# breadth first search over adjacency lists\n"
                  "def bfs(graph, start): ..."),
    "graph-002": ("# shortest path with Dijkstra's heap\n"
                  "def dijkstra(graph, start): ..."),
}
corpus = Corpus(documents=[
    CodeDocument(doc_id, Language.PYTHON, code, family_id=doc_id)
    for doc_id, code in snippets.items()])

index = build_index(corpus, Language.PYTHON)
print(f"indexed {index.doc_count} docs, vocabulary {len(index.postings)}")

for text, golden in [("sort a list with merge sort", "sort-001"),
                     ("shortest path search", "graph-002")]:
    query = Query(family_id=golden, text=text,
                  target_language=Language.PYTHON,
                  source_language=Language.PYTHON)
    result = search(index, query, k=2)
    print(f"\nquery: {text!r}")
    for doc_id, score in result.ranked:
        print(f"  {score:6.3f}  {doc_id}")
    print(f"  P@2 = {precision_at_k(result, {golden}, 2):.2f}   "
          f"R@2 = {recall_at_k(result, {golden}, 1, 2):.2f}")
