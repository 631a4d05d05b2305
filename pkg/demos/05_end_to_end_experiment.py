"""Full pipeline: knowledge injection vs. adversarial attack, with a stand-in
generator so the demo runs offline.

The stand-in generator copies the top retrieved document's code back — the
degenerate case where generation quality is perfect, which isolates the
effect of the perturbation. Point `GenerationParams` at a real
OpenAI-compatible endpoint to run the same cells against a live model.

Run:  python3 demos/05_end_to_end_experiment.py
"""

import re

from racglab import (CodeDocument, Corpus, ExperimentConfig, MutationType,
                     Retriever, Setting, run_cell)
from racglab.corpus import CodeInstance
from racglab.experiment import categorize_perturbation_effects
from racglab.languages import Language

N = 12
instances = []
docs = []
golden = {}
for i in range(N):
    solution = (f"def solve{i}(a, b):\n"
                f"    if a == b and a > 0:\n"
                f"        return a * b + {i}\n"
                f"    if a < b:\n"
                f"        return b - a + {i}\n"
                f"    return a * 2 + {i}\n")
    tests = (f"import sys\n"
             f"try:\n"
             f"    assert solve{i}(3, 3) == 9 + {i}\n"
             f"    assert solve{i}(1, 5) == 4 + {i}\n"
             f"    assert solve{i}(5, 1) == 10 + {i}\n"
             f"except AssertionError:\n"
             f"    sys.exit(1)\n"
             f"except Exception:\n"
             f"    sys.exit(2)\n"
             f"sys.exit(0)\n")
    family = f"fam{i:02d}"
    instances.append(CodeInstance(
        instance_id=f"task-{i:02d}", language=Language.PYTHON,
        nl_prompt=f"combine two integers, flavor {i}",
        reference_solution=solution, test_cases=tests,
        entry_point=f"solve{i}", family_id=family))
    docs.append(CodeDocument(
        doc_id=f"doc-{i:02d}", language=Language.PYTHON, code=solution,
        family_id=family, nl_comment=f"# combine two integers, flavor {i}"))
    golden[(family, Language.PYTHON)] = f"doc-{i:02d}"

corpus = Corpus(documents=docs, golden=golden)


def copy_top_doc(prompt: str) -> str:
    match = re.search(r"```[^\n]*\n(.*?)```", prompt, re.DOTALL)
    body = match.group(1) if match else "pass\n"
    return f"```python\n{body}```"


def run(setting, mutation=None):
    config = ExperimentConfig(
        setting=setting, target_language=Language.PYTHON,
        source_language=Language.PYTHON,
        retriever=Retriever.ORACLE if setting is Setting.ATTACK else None,
        mutation=mutation)
    return run_cell(config, corpus, instances, generate_fn=copy_top_doc)


baseline = run_cell(
    ExperimentConfig(setting=Setting.BASELINE,
                     target_language=Language.PYTHON),
    corpus, instances, generate_fn=copy_top_doc)
injection = run(Setting.INJECTION)
print(f"baseline  pass rate: {baseline.pass_rate:6.2f}")
print(f"injection pass rate: {injection.pass_rate:6.2f}")

print("\nunder attack (one mutation per retrieved document):")
for mutation in MutationType:
    attack = run(Setting.ATTACK, mutation)
    applied = sum(1 for t in attack.per_task if any(t.mutation_applied))
    print(f"  {mutation.value:12s} pass rate {attack.pass_rate:6.2f}  "
          f"(perturbation applied in {applied}/{len(instances)} tasks)")

attack = run(Setting.ATTACK, MutationType.LOGICAL_KEYWORD)
cats = categorize_perturbation_effects(attack, injection, baseline)
print(f"\ncase cube for logical-keyword attack "
      f"(baseline, clean, attack) -> count:")
for key, count in sorted(cats.counts.items()):
    print(f"  {key} -> {count}")
print(f"positive-noise cases: {cats.positive_noise}")
