"""Run candidate solutions in the sandbox and estimate Pass@K.

Run:  python3 demos/04_execution_and_pass_at_k.py
"""

from racglab import execute_candidate, pass_at_k, probe_toolchains
from racglab.corpus import CodeInstance
from racglab.languages import Language

instance = CodeInstance(
    instance_id="demo-abs", language=Language.PYTHON,
    nl_prompt="absolute value", family_id="abs",
    reference_solution="def my_abs(x):\n    return x if x >= 0 else -x\n",
    test_cases=("import sys\n"
                "try:\n"
                "    assert my_abs(-3) == 3\n"
                "    assert my_abs(4) == 4\n"
                "except AssertionError:\n"
                "    sys.exit(1)\n"
                "except Exception:\n"
                "    sys.exit(2)\n"
                "sys.exit(0)\n"),
    entry_point="my_abs")

candidates = {
    "correct": instance.reference_solution,
    "wrong sign": "def my_abs(x):\n    return -x\n",
    "crashes": "def my_abs(x):\n    return x / 0\n",
    "syntax error": "def my_abs(x:\n",
}
for label, code in candidates.items():
    result = execute_candidate(code, instance)
    print(f"{label:14s} -> {result.verdict.value}")

print("\nPass@K for n=5 samples with c=2 passing:")
for k in (1, 2, 3, 5):
    print(f"  Pass@{k} = {pass_at_k(5, 2, k):.4f}")

available = probe_toolchains()
usable = sorted(lang.value for lang, ok in available.items() if ok)
print(f"\ntoolchains available here: {', '.join(usable)}")
