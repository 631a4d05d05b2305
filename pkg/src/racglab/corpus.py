"""Corpus loading, validation, and the Doc / Doc-w/o-NL variants.

A corpus is a JSONL file of documents plus a companion golden.jsonl index
mapping (family_id, language) to the annotated most-relevant document.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable

from .errors import DuplicateId, ParseError
from .languages import Language
from .lexer import strip_comment_text

log = logging.getLogger(__name__)


class Variant(str, Enum):
    DOC = "doc"
    DOC_NO_NL = "doc_no_nl"


@dataclass(frozen=True)
class CodeInstance:
    instance_id: str
    language: Language
    nl_prompt: str
    reference_solution: str
    test_cases: str
    entry_point: str
    family_id: str


@dataclass(frozen=True)
class CodeDocument:
    doc_id: str
    language: Language
    code: str
    family_id: str
    nl_comment: str | None = None


@dataclass
class Corpus:
    documents: list[CodeDocument]
    golden: dict[tuple[str, Language], str] = field(default_factory=dict)
    setting_variant: Variant = Variant.DOC

    def __post_init__(self) -> None:
        self._by_id = {d.doc_id: d for d in self.documents}

    def __len__(self) -> int:
        return len(self.documents)

    def get(self, doc_id: str) -> CodeDocument:
        return self._by_id[doc_id]

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._by_id

    def in_language(self, language: Language) -> list[CodeDocument]:
        return [d for d in self.documents if d.language == language]


def document_text(doc: CodeDocument, variant: Variant = Variant.DOC) -> str:
    """Text fed to retrievers: comment block + code in the Doc variant,
    bare code otherwise."""
    if variant is Variant.DOC and doc.nl_comment:
        return doc.nl_comment + "\n" + doc.code
    return doc.code


@dataclass(frozen=True)
class Violation:
    doc_id: str | None
    family_id: str | None
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _parse_language(value: str, line_no: int) -> Language:
    try:
        return Language(value)
    except ValueError:
        raise ParseError(line_no, f"unknown language {value!r}")


def load_corpus(path: str | Path, golden_path: str | Path | None = None,
                variant: Variant = Variant.DOC) -> Corpus:
    """Load a JSONL corpus; documents keep file order.

    If golden_path is None, a golden.jsonl file next to the corpus is used
    when present.
    """
    path = Path(path)
    documents: list[CodeDocument] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                raise ParseError(line_no, "invalid JSON")
            for req in ("doc_id", "language", "code", "family_id"):
                if req not in obj:
                    raise ParseError(line_no, f"missing field {req!r}")
            if obj["doc_id"] in seen:
                raise DuplicateId(obj["doc_id"])
            seen.add(obj["doc_id"])
            documents.append(CodeDocument(
                doc_id=obj["doc_id"],
                language=_parse_language(obj["language"], line_no),
                code=obj["code"],
                nl_comment=obj.get("nl_comment"),
                family_id=obj["family_id"],
            ))

    golden: dict[tuple[str, Language], str] = {}
    if golden_path is None:
        candidate = path.parent / "golden.jsonl"
        golden_path = candidate if candidate.exists() else None
    if golden_path is not None:
        with Path(golden_path).open(encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError:
                    raise ParseError(line_no, "invalid JSON in golden index")
                lang = _parse_language(obj["language"], line_no)
                golden[(obj["family_id"], lang)] = obj["doc_id"]

    return Corpus(documents=documents, golden=golden, setting_variant=variant)


def save_corpus(corpus: Corpus, path: str | Path,
                golden_path: str | Path | None = None) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for doc in corpus.documents:
            obj = {
                "doc_id": doc.doc_id,
                "language": doc.language.value,
                "code": doc.code,
                "family_id": doc.family_id,
            }
            if doc.nl_comment is not None:
                obj["nl_comment"] = doc.nl_comment
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
    if golden_path is None:
        golden_path = path.parent / "golden.jsonl"
    with Path(golden_path).open("w", encoding="utf-8") as fh:
        for (family_id, lang), doc_id in sorted(
                corpus.golden.items(), key=lambda kv: (kv[0][0], kv[0][1].value)):
            fh.write(json.dumps({
                "family_id": family_id,
                "language": lang.value,
                "doc_id": doc_id,
            }) + "\n")


def strip_comments(doc: CodeDocument) -> CodeDocument:
    """Remove every comment of the document's language; clear nl_comment.
    Unterminated block comments strip to end of input with a warning."""
    stripped, warnings = strip_comment_text(doc.code, doc.language)
    for w in warnings:
        log.warning("%s: %s", doc.doc_id, w)
    return replace(doc, code=stripped, nl_comment=None)


def make_variant(corpus: Corpus, variant: Variant) -> Corpus:
    if variant is Variant.DOC:
        return corpus
    docs = [strip_comments(d) for d in corpus.documents]
    return Corpus(documents=docs, golden=dict(corpus.golden),
                  setting_variant=Variant.DOC_NO_NL)


def validate_corpus(corpus: Corpus) -> ValidationReport:
    report = ValidationReport()
    by_id: dict[str, CodeDocument] = {}
    for doc in corpus.documents:
        if doc.doc_id in by_id:
            report.violations.append(Violation(
                doc.doc_id, doc.family_id, "duplicate doc_id"))
        by_id[doc.doc_id] = doc
        if not doc.code:
            report.violations.append(Violation(
                doc.doc_id, doc.family_id, "empty code"))
        if corpus.setting_variant is Variant.DOC_NO_NL:
            if doc.nl_comment is not None:
                report.violations.append(Violation(
                    doc.doc_id, doc.family_id,
                    "nl_comment present in pure-code corpus"))
            stripped, _ = strip_comment_text(doc.code, doc.language)
            if stripped != doc.code:
                report.violations.append(Violation(
                    doc.doc_id, doc.family_id,
                    "comment tokens present in pure-code corpus"))
    for (family_id, lang), doc_id in corpus.golden.items():
        doc = by_id.get(doc_id)
        if doc is None:
            report.violations.append(Violation(
                doc_id, family_id, "golden entry references missing doc_id"))
        elif doc.language != lang:
            report.violations.append(Violation(
                doc_id, family_id,
                f"golden entry language mismatch: {doc.language} != {lang}"))
    return report


def validate_instances(instances: Iterable[CodeInstance]) -> ValidationReport:
    report = ValidationReport()
    seen: set[tuple[str, Language]] = set()
    for inst in instances:
        if not inst.reference_solution:
            report.violations.append(Violation(
                inst.instance_id, inst.family_id, "empty reference_solution"))
        if not inst.test_cases:
            report.violations.append(Violation(
                inst.instance_id, inst.family_id, "empty test_cases"))
        if inst.entry_point and inst.entry_point not in inst.reference_solution:
            report.violations.append(Violation(
                inst.instance_id, inst.family_id,
                f"entry_point {inst.entry_point!r} absent from solution"))
        key = (inst.family_id, inst.language)
        if key in seen:
            report.violations.append(Violation(
                inst.instance_id, inst.family_id,
                "duplicate (family_id, language)"))
        seen.add(key)
    return report


@dataclass
class VerificationReport:
    # instance_id -> per-round verdict names
    rounds: dict[str, list[str]] = field(default_factory=dict)
    failures: dict[str, str] = field(default_factory=dict)

    def verified(self, instance_id: str) -> bool:
        verdicts = self.rounds.get(instance_id, [])
        return bool(verdicts) and all(v == "pass" for v in verdicts)


def verify_solutions(instances: Iterable[CodeInstance],
                     executor: Callable[[str, CodeInstance], "object"],
                     rounds: int = 1) -> VerificationReport:
    """Run each instance's reference solution against its own tests.

    `executor(code, instance)` must return an object with a `verdict`
    attribute whose `.value` is "pass" on success (see racglab.execute).
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    report = VerificationReport()
    for inst in instances:
        verdicts = []
        for _ in range(rounds):
            result = executor(inst.reference_solution, inst)
            verdicts.append(result.verdict.value)
            if result.verdict.value != "pass" and inst.instance_id not in report.failures:
                report.failures[inst.instance_id] = getattr(
                    result, "stderr_tail", "") or result.verdict.value
        report.rounds[inst.instance_id] = verdicts
    return report


def load_instances(path: str | Path) -> list[CodeInstance]:
    instances = []
    with Path(path).open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                raise ParseError(line_no, "invalid JSON")
            instances.append(CodeInstance(
                instance_id=obj["instance_id"],
                language=_parse_language(obj["language"], line_no),
                nl_prompt=obj["nl_prompt"],
                reference_solution=obj["reference_solution"],
                test_cases=obj["test_cases"],
                entry_point=obj.get("entry_point", ""),
                family_id=obj["family_id"],
            ))
    return instances


def save_instances(instances: Iterable[CodeInstance], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(json.dumps({
                "instance_id": inst.instance_id,
                "language": inst.language.value,
                "nl_prompt": inst.nl_prompt,
                "reference_solution": inst.reference_solution,
                "test_cases": inst.test_cases,
                "entry_point": inst.entry_point,
                "family_id": inst.family_id,
            }, ensure_ascii=False) + "\n")
