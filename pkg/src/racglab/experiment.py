"""Experiment settings, the source x target matrix runner, aggregation, and
perturbation-effect case analysis."""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import retrieve
from .corpus import (CodeDocument, CodeInstance, Corpus, Variant,
                     document_text, make_variant)
from .errors import (EmbeddingServiceError, GenerationServiceError,
                     MissingBaseline, RacglabError, SandboxUnavailable,
                     TaskSetMismatch)
from .execute import ExecutionResult, Verdict, execute_candidate
from .generate import (GenerationParams, PromptSpec, TemplateId, build_prompt,
                       extract_code, generate_code)
from .languages import Language
from .mutate import DEFAULT_SEED, MutationType, perturb_retrieved
from .retrieve import EmbeddingCache, EmbeddingClient, Query

log = logging.getLogger(__name__)


class Setting(str, Enum):
    BASELINE = "baseline"
    INJECTION = "injection"
    DOC = "doc"
    DOC_NO_NL = "doc_no_nl"
    ATTACK = "attack"


class Retriever(str, Enum):
    ORACLE = "oracle"
    SPARSE = "sparse"
    EMBEDDING = "embedding"


@dataclass(frozen=True)
class ExperimentConfig:
    setting: Setting
    target_language: Language
    source_language: Language | None = None
    k: int = 3
    seed: int = DEFAULT_SEED
    mutation: MutationType | None = None
    retriever: Retriever | None = None
    generation: GenerationParams | None = None

    def __post_init__(self) -> None:
        if self.setting is Setting.BASELINE:
            if self.source_language is not None or self.retriever is not None:
                raise ValueError("baseline takes no source language or retriever")
            return
        if self.source_language is None:
            raise ValueError(f"{self.setting.value} requires a source language")
        if self.setting is Setting.INJECTION:
            if self.retriever not in (None, Retriever.ORACLE):
                raise ValueError("injection forces the oracle retriever")
            object.__setattr__(self, "retriever", Retriever.ORACLE)
        elif self.retriever is None:
            raise ValueError(f"{self.setting.value} requires a retriever")
        if self.setting is Setting.ATTACK and self.mutation is None:
            raise ValueError("attack requires a mutation type")

    def to_dict(self) -> dict:
        return {
            "setting": self.setting.value,
            "target_language": self.target_language.value,
            "source_language": (self.source_language.value
                                if self.source_language else None),
            "k": self.k,
            "seed": self.seed,
            "mutation": self.mutation.value if self.mutation else None,
            "retriever": self.retriever.value if self.retriever else None,
            "model": self.generation.model_name if self.generation else None,
        }


@dataclass(frozen=True)
class TaskRecord:
    family_id: str
    verdict: Verdict
    retrieved_doc_ids: tuple[str, ...]
    mutation_applied: tuple[bool, ...]
    extraction_method: str = ""

    def to_dict(self) -> dict:
        return {
            "family_id": self.family_id,
            "verdict": self.verdict.value,
            "retrieved_doc_ids": list(self.retrieved_doc_ids),
            "mutation_applied": list(self.mutation_applied),
            "extraction_method": self.extraction_method,
        }


@dataclass
class CellResult:
    config: ExperimentConfig
    pass_rate: float
    n_tasks: int
    per_task: list[TaskRecord]

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "pass_rate": self.pass_rate,
            "n_tasks": self.n_tasks,
            "per_task": [t.to_dict() for t in self.per_task],
        }


# (setting, source, target, mutation) — one slot per distinct cell config
CellKey = tuple[Setting, Language, Language, MutationType | None]


def cell_key(config: ExperimentConfig) -> CellKey:
    return (config.setting, config.source_language, config.target_language,
            config.mutation)


@dataclass
class ResultsTable:
    cells: dict[CellKey, CellResult] = field(default_factory=dict)
    baseline: dict[Language, CellResult] = field(default_factory=dict)


GenerateFn = Callable[[str], str]
ExecuteFn = Callable[[str, CodeInstance], ExecutionResult]


def _retrieve_docs(config: ExperimentConfig, corpus: Corpus, query: Query,
                   sparse_index, embed_client: EmbeddingClient | None,
                   embed_cache: EmbeddingCache | None) -> list[CodeDocument]:
    if config.retriever is Retriever.ORACLE:
        return [retrieve.oracle_retrieve(corpus, query)]
    if config.retriever is Retriever.SPARSE:
        result = retrieve.search(sparse_index, query, k=config.k)
    else:
        result = retrieve.embed_search(embed_client, corpus, query,
                                       k=config.k, cache=embed_cache)
    return [corpus.get(doc_id) for doc_id in result.doc_ids]


def run_cell(config: ExperimentConfig, corpus: Corpus,
             instances: Sequence[CodeInstance], *,
             generate_fn: GenerateFn | None = None,
             execute_fn: ExecuteFn | None = None,
             embed_client: EmbeddingClient | None = None,
             embed_cache: EmbeddingCache | None = None,
             clean_retrieval: dict[str, list[str]] | None = None) -> CellResult:
    """One full pipeline pass (retrieve, perturb, prompt, generate, extract,
    execute) over a task set.

    clean_retrieval maps family_id to the doc_ids retrieved in the matching
    clean cell; attack cells perturb exactly those documents.
    """
    bad = [i for i in instances if i.language != config.target_language]
    if bad:
        raise ValueError(
            f"{len(bad)} instances are not in target language "
            f"{config.target_language}")
    if generate_fn is None:
        if config.generation is None:
            raise ValueError("config.generation required without generate_fn")
        params = config.generation
        generate_fn = lambda prompt: generate_code(params, prompt)
    execute_fn = execute_fn or execute_candidate

    working = corpus
    if config.setting is Setting.DOC_NO_NL:
        working = make_variant(corpus, Variant.DOC_NO_NL)

    sparse_index = None
    if config.retriever is Retriever.SPARSE:
        sparse_index = retrieve.build_index(working, config.source_language)

    per_task: list[TaskRecord] = []
    passes = 0
    for inst in instances:
        try:
            record = _run_task(config, working, inst, generate_fn, execute_fn,
                               sparse_index, embed_client, embed_cache,
                               clean_retrieval)
        except (SandboxUnavailable, GenerationServiceError,
                EmbeddingServiceError) as exc:
            raise type(exc)(f"task {inst.family_id}: {exc}") from exc
        per_task.append(record)
        if record.verdict is Verdict.PASS:
            passes += 1
    n = len(instances)
    return CellResult(config=config,
                      pass_rate=100.0 * passes / n if n else 0.0,
                      n_tasks=n, per_task=per_task)


def _run_task(config, corpus, inst, generate_fn, execute_fn, sparse_index,
              embed_client, embed_cache, clean_retrieval) -> TaskRecord:
    docs: list[CodeDocument] = []
    applied: tuple[bool, ...] = ()
    if config.setting is not Setting.BASELINE:
        query = Query(family_id=inst.family_id, text=inst.nl_prompt,
                      target_language=config.target_language,
                      source_language=config.source_language)
        if config.setting is Setting.ATTACK and clean_retrieval is not None:
            docs = [corpus.get(d) for d in clean_retrieval[inst.family_id]]
        else:
            docs = _retrieve_docs(config, corpus, query, sparse_index,
                                  embed_client, embed_cache)
        if config.setting is Setting.ATTACK:
            docs, records = perturb_retrieved(docs, config.mutation,
                                              config.seed)
            applied = tuple(r.applied for r in records)

    if docs:
        spec = PromptSpec(
            query_text=inst.nl_prompt,
            target_language=config.target_language,
            context_docs=tuple((d.language, document_text(d, corpus.setting_variant))
                               for d in docs),
            template_id=TemplateId.RACG_V1)
    else:
        spec = PromptSpec(query_text=inst.nl_prompt,
                          target_language=config.target_language,
                          template_id=TemplateId.BASELINE_V1)
    prompt = build_prompt(spec)
    response = generate_fn(prompt)
    try:
        outcome = extract_code(response, config.target_language)
    except RacglabError:
        return TaskRecord(inst.family_id, Verdict.TEST_FAILURE,
                          tuple(d.doc_id for d in docs), applied,
                          extraction_method="none")
    result = execute_fn(outcome.extracted_code, inst)
    return TaskRecord(inst.family_id, result.verdict,
                      tuple(d.doc_id for d in docs), applied,
                      outcome.extraction_method.value)


def aggregate_stats(cells: Iterable[CellResult | float],
                    ddof: int = 1) -> tuple[float, float]:
    """Mean and standard deviation of cell pass rates. ddof=1 (sample std)
    matches the published Mean/Std columns."""
    rates = [c.pass_rate if isinstance(c, CellResult) else float(c)
             for c in cells]
    if not rates:
        raise ValueError("need at least one cell")
    mean = sum(rates) / len(rates)
    if len(rates) <= ddof:
        return mean, 0.0
    var = sum((r - mean) ** 2 for r in rates) / (len(rates) - ddof)
    return mean, math.sqrt(var)


@dataclass
class DeltaCell:
    absolute: float
    relative: float | None  # None when the baseline is zero


@dataclass
class DeltaTable:
    cells: dict[tuple[Language, Language], DeltaCell]
    row_means: dict[Language, float]
    col_means: dict[Language, float]
    grand_mean: float


def delta_table(results: ResultsTable,
                setting: Setting | None = None) -> DeltaTable:
    cells: dict[tuple[Language, Language], DeltaCell] = {}
    for (cell_setting, src, tgt, _), cell in results.cells.items():
        if setting is not None and cell_setting is not setting:
            continue
        if (src, tgt) in cells:
            raise ValueError(
                f"multiple cells for ({src.value}, {tgt.value}); "
                f"pass setting= to disambiguate")
        if tgt not in results.baseline:
            raise MissingBaseline(tgt.value)
        base = results.baseline[tgt].pass_rate
        delta = cell.pass_rate - base
        relative = 100.0 * delta / base if base != 0 else None
        cells[(src, tgt)] = DeltaCell(absolute=delta, relative=relative)

    def _mean(values: list[float]) -> float:
        return sum(values) / len(values) if values else 0.0

    sources = sorted({s for s, _ in cells}, key=lambda l: l.value)
    targets = sorted({t for _, t in cells}, key=lambda l: l.value)
    row_means = {s: _mean([c.absolute for (s2, _), c in cells.items() if s2 == s])
                 for s in sources}
    col_means = {t: _mean([c.absolute for (_, t2), c in cells.items() if t2 == t])
                 for t in targets}
    grand = _mean([c.absolute for c in cells.values()])
    return DeltaTable(cells=cells, row_means=row_means, col_means=col_means,
                      grand_mean=grand)


def relative_delta(enhanced: float, baseline: float) -> float:
    """Relative improvement in percent, e.g. 95.85 vs 55.28 -> ~73."""
    if baseline == 0:
        raise ZeroDivisionError("baseline pass rate is zero")
    return 100.0 * (enhanced - baseline) / baseline


@dataclass
class CaseCategories:
    """Counts over the (baseline pass, clean pass, attack pass) cube."""
    counts: dict[tuple[bool, bool, bool], int]
    mutation: MutationType | None

    @property
    def positive_noise(self) -> int:
        return self.counts.get((False, False, True), 0)

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def categorize_perturbation_effects(attack: CellResult, clean: CellResult,
                                    baseline: CellResult) -> CaseCategories:
    def by_family(cell: CellResult) -> dict[str, bool]:
        return {t.family_id: t.verdict is Verdict.PASS for t in cell.per_task}

    b, c, a = by_family(baseline), by_family(clean), by_family(attack)
    if not (b.keys() == c.keys() == a.keys()):
        raise TaskSetMismatch("cells cover different task sets")
    counts: dict[tuple[bool, bool, bool], int] = {}
    for fam in b:
        key = (b[fam], c[fam], a[fam])
        counts[key] = counts.get(key, 0) + 1
    return CaseCategories(counts=counts, mutation=attack.config.mutation)


# ---------------------------------------------------------------------------
# matrix runner with resumable per-cell caching


def _corpus_hash(corpus: Corpus) -> str:
    h = hashlib.sha256()
    for doc in corpus.documents:
        h.update(doc.doc_id.encode())
        h.update(doc.code.encode())
        h.update((doc.nl_comment or "").encode())
    for key, val in sorted((f"{f}|{l.value}", d)
                           for (f, l), d in corpus.golden.items()):
        h.update(key.encode())
        h.update(val.encode())
    return h.hexdigest()[:16]


def _instances_hash(instances: Sequence[CodeInstance]) -> str:
    h = hashlib.sha256()
    for inst in instances:
        h.update(inst.instance_id.encode())
        h.update(inst.reference_solution.encode())
        h.update(inst.test_cases.encode())
    return h.hexdigest()[:16]


def cell_cache_key(config: ExperimentConfig, corpus: Corpus,
                   instances: Sequence[CodeInstance]) -> str:
    payload = json.dumps({
        "config": config.to_dict(),
        "corpus": _corpus_hash(corpus),
        "instances": _instances_hash(instances),
        "template": TemplateId.RACG_V1.value,
    }, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:24]


def _load_cached_cell(path: Path, config: ExperimentConfig) -> CellResult:
    data = json.loads(path.read_text())
    per_task = [TaskRecord(
        family_id=t["family_id"],
        verdict=Verdict(t["verdict"]),
        retrieved_doc_ids=tuple(t["retrieved_doc_ids"]),
        mutation_applied=tuple(t["mutation_applied"]),
        extraction_method=t.get("extraction_method", ""),
    ) for t in data["per_task"]]
    return CellResult(config=config, pass_rate=data["pass_rate"],
                      n_tasks=data["n_tasks"], per_task=per_task)


def run_matrix(configs: Sequence[ExperimentConfig], corpus: Corpus,
               instances_by_language: dict[Language, Sequence[CodeInstance]],
               out_dir: str | Path, *,
               generate_fn: GenerateFn | None = None,
               execute_fn: ExecuteFn | None = None,
               embed_client: EmbeddingClient | None = None) -> ResultsTable:
    """Run every cell config, caching completed cells on disk so a restart
    skips them, then write deterministic CSV / Markdown / audit reports."""
    out_dir = Path(out_dir)
    cell_dir = out_dir / "cells"
    cell_dir.mkdir(parents=True, exist_ok=True)

    table = ResultsTable()
    embed_cache = EmbeddingCache()
    for config in configs:
        instances = instances_by_language[config.target_language]
        key = cell_cache_key(config, corpus, instances)
        cache_path = cell_dir / f"{key}.json"
        if cache_path.exists():
            log.info("cell cache hit: %s", key)
            cell = _load_cached_cell(cache_path, config)
        else:
            cell = run_cell(config, corpus, instances,
                            generate_fn=generate_fn, execute_fn=execute_fn,
                            embed_client=embed_client,
                            embed_cache=embed_cache)
            cache_path.write_text(json.dumps(cell.to_dict(), sort_keys=True))
        if config.setting is Setting.BASELINE:
            table.baseline[config.target_language] = cell
        else:
            table.cells[cell_key(config)] = cell

    write_reports(table, out_dir)
    return table


def _cell_sort_key(item):
    (setting, src, tgt, mutation), _ = item
    return (setting.value, src.value, tgt.value,
            mutation.value if mutation else "")


def write_reports(table: ResultsTable, out_dir: str | Path) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    with (out_dir / "cells.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["setting", "source", "target", "retriever",
                         "mutation", "pass_rate", "n_tasks"])
        for tgt in sorted(table.baseline, key=lambda l: l.value):
            cell = table.baseline[tgt]
            writer.writerow(["baseline", "", tgt.value, "", "",
                             f"{cell.pass_rate:.2f}", cell.n_tasks])
        for (setting, src, tgt, mutation), cell in sorted(
                table.cells.items(), key=_cell_sort_key):
            cfg = cell.config
            writer.writerow([
                setting.value, src.value, tgt.value,
                cfg.retriever.value if cfg.retriever else "",
                mutation.value if mutation else "",
                f"{cell.pass_rate:.2f}", cell.n_tasks])

    lines = ["# Pass@1 matrix", ""]
    targets = sorted({key[2] for key in table.cells} | set(table.baseline),
                     key=lambda l: l.value)
    settings = sorted({(key[0], key[3]) for key in table.cells},
                      key=lambda pair: (pair[0].value,
                                        pair[1].value if pair[1] else ""))
    if targets and table.baseline:
        lines.append("## baseline")
        lines.append("")
        lines.append("| " + " | ".join(t.value for t in targets) + " |")
        lines.append("|" + "---|" * len(targets))
        row = [f"{table.baseline[t].pass_rate:.2f}"
               if t in table.baseline else "" for t in targets]
        lines.append("| " + " | ".join(row) + " |")
        lines.append("")
    for setting, mutation in settings:
        title = setting.value + (f" / {mutation.value}" if mutation else "")
        lines.append(f"## {title}")
        lines.append("")
        sources = sorted({key[1] for key in table.cells
                          if key[0] is setting and key[3] == mutation},
                         key=lambda l: l.value)
        lines.append("| source \\ target | "
                     + " | ".join(t.value for t in targets) + " |")
        lines.append("|" + "---|" * (len(targets) + 1))
        for s in sources:
            row = [s.value]
            for t in targets:
                cell = table.cells.get((setting, s, t, mutation))
                if cell is None:
                    row.append("\\")
                    continue
                text = f"{cell.pass_rate:.2f}"
                base = table.baseline.get(t)
                if base is not None:
                    text += f" ({cell.pass_rate - base.pass_rate:+.2f})"
                row.append(text)
            lines.append("| " + " | ".join(row) + " |")
        lines.append("")
    (out_dir / "report.md").write_text("\n".join(lines))

    with (out_dir / "audit.jsonl").open("w") as fh:
        for tgt in sorted(table.baseline, key=lambda l: l.value):
            for task in table.baseline[tgt].per_task:
                fh.write(json.dumps({
                    "setting": "baseline", "source": None, "mutation": None,
                    "target": tgt.value, **task.to_dict()},
                    sort_keys=True) + "\n")
        for (setting, src, tgt, mutation), cell in sorted(
                table.cells.items(), key=_cell_sort_key):
            for task in cell.per_task:
                fh.write(json.dumps({
                    "setting": setting.value, "source": src.value,
                    "mutation": mutation.value if mutation else None,
                    "target": tgt.value, **task.to_dict()},
                    sort_keys=True) + "\n")
