"""Build a small multi-language corpus, validate it, and derive the
comment-free variant.

Run:  python3 demos/01_corpus_and_variants.py
"""

from racglab import (CodeDocument, Corpus, Variant, document_text,
                     make_variant, validate_corpus)
from racglab.languages import Language

docs = [
    CodeDocument(
        doc_id="py-001", language=Language.PYTHON, family_id="two-sum",
        nl_comment="# return indices of two numbers adding up to target",
        code=("def two_sum(nums, target):\n"
              "    seen = {}  # value -> index\n"
              "    for i, n in enumerate(nums):\n"
              "        if target - n in seen:\n"
              "            return seen[target - n], i\n"
              "        seen[n] = i\n"
              "    return None\n")),
    CodeDocument(
        doc_id="jv-001", language=Language.JAVA, family_id="two-sum",
        nl_comment="// return indices of two numbers adding up to target",
        code=("int[] twoSum(int[] nums, int target) {\n"
              "    /* brute force */\n"
              "    for (int i = 0; i < nums.length; i++)\n"
              "        for (int j = i + 1; j < nums.length; j++)\n"
              "            if (nums[i] + nums[j] == target)\n"
              "                return new int[]{i, j};\n"
              "    return null;\n"
              "}\n")),
]

corpus = Corpus(documents=docs,
                golden={("two-sum", Language.PYTHON): "py-001",
                        ("two-sum", Language.JAVA): "jv-001"})

report = validate_corpus(corpus)
print(f"validation ok: {report.ok}")

print("\n--- Doc variant (what the retriever indexes) ---")
print(document_text(docs[0], Variant.DOC))

print("--- Doc w/o NL variant (comments stripped) ---")
no_nl = make_variant(corpus, Variant.DOC_NO_NL)
for doc in no_nl.documents:
    print(f"[{doc.language}]")
    print(doc.code)
