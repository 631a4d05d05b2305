"""Apply each of the four adversarial mutation operators to one document
and show the seeded determinism guarantee.

Run:  python3 demos/02_mutation_operators.py
"""

import difflib

from racglab import CodeDocument, MutationType, apply_mutation
from racglab.languages import Language

doc = CodeDocument(
    doc_id="demo-doc", language=Language.PYTHON, family_id="clamp",
    code=("def clamp(value, low, high):\n"
          "    if value < low and low <= high:\n"
          "        return low\n"
          "    elif value > high:\n"
          "        return high\n"
          "    else:\n"
          "        return value\n"))

for mutation in MutationType:
    record = apply_mutation(doc, mutation, seed=42)
    print(f"=== {mutation.value} (applied={record.applied}) ===")
    diff = difflib.unified_diff(record.original.splitlines(),
                                record.mutated.splitlines(),
                                lineterm="", n=1)
    print("\n".join(list(diff)[3:]) or "(no change)")
    print()

# same seed, same outcome -- regardless of batch composition
again = apply_mutation(doc, MutationType.LOGICAL_KEYWORD, seed=42)
first = apply_mutation(doc, MutationType.LOGICAL_KEYWORD, seed=42)
print(f"deterministic under seed 42: {again == first}")
different = apply_mutation(doc, MutationType.LOGICAL_KEYWORD, seed=7)
print(f"seed 7 picks the same site: {different.site == first.site}")
