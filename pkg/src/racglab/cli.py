"""Single `racglab` entry point multiplexing corpus, mutation, retrieval,
and experiment workflows.

Exit codes: 0 success, 1 operational error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import execute, experiment, mutate, retrieve
from .corpus import Variant, load_corpus, load_instances, save_corpus
from .errors import RacglabError
from .generate import GenerationParams
from .languages import Language
from .mutate import DEFAULT_SEED, MutationType

log = logging.getLogger(__name__)

EMBED_KEY_ENV = "EMBEDDING_API_KEY"


def _emit(payload, args, default_text=None) -> None:
    if getattr(args, "json", False):
        text = json.dumps(payload, indent=2, sort_keys=True)
    else:
        text = default_text if default_text is not None else json.dumps(
            payload, indent=2, sort_keys=True)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")
    else:
        print(text)


def _language(value: str) -> Language:
    try:
        return Language(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown language {value!r}")


def _add_common(p: argparse.ArgumentParser, *names: str) -> None:
    if "corpus" in names:
        p.add_argument("--corpus", required=True)
    if "golden" in names:
        p.add_argument("--golden", default=None)
    if "out" in names:
        p.add_argument("--out", default=None)
    if "json" in names:
        p.add_argument("--json", action="store_true")
    if "seed" in names:
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    if "k" in names:
        p.add_argument("--k", type=int, default=3)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="racglab")
    parser.add_argument("--jobs", type=int,
                        default=min(os.cpu_count() or 1, 8))
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("corpus-validate", help="check corpus invariants")
    _add_common(p, "corpus", "golden", "json", "out")
    p.add_argument("--variant", choices=[v.value for v in Variant],
                   default=Variant.DOC.value)

    p = sub.add_parser("corpus-variant", help="derive a corpus variant")
    _add_common(p, "corpus", "golden")
    p.add_argument("--variant", choices=[v.value for v in Variant],
                   required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("mutate", help="apply one mutation operator per doc")
    _add_common(p, "corpus", "golden", "seed")
    p.add_argument("--type", required=True, dest="mutation",
                   choices=[m.value for m in MutationType])
    p.add_argument("--out", required=True)

    p = sub.add_parser("search", help="sparse retrieval over one language")
    _add_common(p, "corpus", "golden", "k", "json", "out")
    p.add_argument("--language", type=_language, required=True)
    p.add_argument("--query", required=True)

    p = sub.add_parser("index", help="report sparse-index statistics")
    _add_common(p, "corpus", "golden", "json", "out")
    p.add_argument("--language", type=_language, required=True)

    p = sub.add_parser("eval-retrieval",
                       help="precision/recall@k against the golden index")
    _add_common(p, "corpus", "golden", "k", "json", "out")
    p.add_argument("--language", type=_language, required=True)
    p.add_argument("--queries", required=True,
                   help="JSONL with family_id and text fields")

    p = sub.add_parser("run-cell", help="run one experiment cell")
    _add_common(p, "corpus", "golden", "k", "seed", "json", "out")
    p.add_argument("--instances", required=True)
    p.add_argument("--setting", required=True,
                   choices=[s.value for s in experiment.Setting])
    p.add_argument("--target", type=_language, required=True)
    p.add_argument("--source", type=_language, default=None)
    p.add_argument("--retriever", default=None,
                   choices=[r.value for r in experiment.Retriever])
    p.add_argument("--mutation", default=None,
                   choices=[m.value for m in MutationType])
    p.add_argument("--endpoint", default=None)
    p.add_argument("--embed-endpoint", default=None)
    p.add_argument("--model", default=None)

    p = sub.add_parser("run-matrix", help="run a matrix of cells from a plan")
    _add_common(p, "corpus", "golden")
    p.add_argument("--plan", required=True,
                   help="JSON list of cell configs (run-cell flag names)")
    p.add_argument("--instances", required=True)
    p.add_argument("--endpoint", default=None)
    p.add_argument("--embed-endpoint", default=None)
    p.add_argument("--model", default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("report", help="rebuild reports from cached cells")
    p.add_argument("--matrix-dir", required=True)

    p = sub.add_parser("pass-at-k", help="unbiased Pass@K estimate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default=None)
    return parser


def _load(args, variant: Variant = Variant.DOC):
    return load_corpus(args.corpus, args.golden, variant)


def cmd_corpus_validate(args) -> int:
    corpus = _load(args, Variant(args.variant))
    report = corpus_mod.validate_corpus(corpus)
    payload = {"ok": report.ok,
               "violations": [{"doc_id": v.doc_id, "family_id": v.family_id,
                               "message": v.message}
                              for v in report.violations]}
    text = ("OK: no violations" if report.ok else
            "\n".join(f"{v.doc_id}: {v.message}" for v in report.violations))
    _emit(payload, args, text)
    return 0 if report.ok else 1


def cmd_corpus_variant(args) -> int:
    corpus = corpus_mod.make_variant(_load(args), Variant(args.variant))
    save_corpus(corpus, args.out)
    return 0


def cmd_mutate(args) -> int:
    corpus = _load(args)
    mutation = MutationType(args.mutation)
    out = Path(args.out)
    mutated_docs, records = mutate.perturb_retrieved(
        list(corpus.documents), mutation, args.seed)
    save_corpus(corpus_mod.Corpus(documents=mutated_docs,
                                  golden=dict(corpus.golden)), out)
    with out.parent.joinpath("mutations.jsonl").open("w") as fh:
        for r in records:
            fh.write(json.dumps({
                "doc_id": r.doc_id, "mutation": r.mutation.value,
                "seed": r.seed, "applied": r.applied,
                "site": None if r.site is None else {
                    "start": r.site.start, "end": r.site.end,
                    "kind": r.site.kind.value,
                    "token_text": r.site.token_text},
            }, sort_keys=True) + "\n")
    return 0


def cmd_search(args) -> int:
    corpus = _load(args)
    index = retrieve.build_index(corpus, args.language)
    query = retrieve.Query(family_id="cli", text=args.query,
                           target_language=args.language,
                           source_language=args.language)
    result = retrieve.search(index, query, k=args.k)
    payload = [{"doc_id": d, "score": s} for d, s in result.ranked]
    text = "\n".join(f"{s:10.4f}  {d}" for d, s in result.ranked)
    _emit(payload, args, text)
    return 0


def cmd_index(args) -> int:
    corpus = _load(args)
    index = retrieve.build_index(corpus, args.language)
    payload = {"language": args.language.value, "doc_count": index.doc_count,
               "vocabulary": len(index.postings),
               "avg_doc_length": index.avg_doc_length}
    _emit(payload, args)
    return 0


def cmd_eval_retrieval(args) -> int:
    corpus = _load(args)
    index = retrieve.build_index(corpus, args.language)
    precisions, recalls = [], []
    with open(args.queries, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            query = retrieve.Query(family_id=obj["family_id"],
                                   text=obj["text"],
                                   target_language=args.language,
                                   source_language=args.language)
            golden_id = corpus.golden.get((obj["family_id"], args.language))
            if golden_id is None:
                continue
            result = retrieve.search(index, query, k=args.k)
            precisions.append(retrieve.precision_at_k(result, {golden_id},
                                                      args.k))
            recalls.append(retrieve.recall_at_k(result, {golden_id}, 1,
                                                args.k))
    if not precisions:
        print("no queries with golden annotations", file=sys.stderr)
        return 1
    payload = {"k": args.k, "queries": len(precisions),
               "precision_at_k": 100.0 * sum(precisions) / len(precisions),
               "recall_at_k": 100.0 * sum(recalls) / len(recalls)}
    text = (f"queries={payload['queries']}  "
            f"P@{args.k}={payload['precision_at_k']:.2f}  "
            f"R@{args.k}={payload['recall_at_k']:.2f}")
    _emit(payload, args, text)
    return 0


def _cell_config(args_like: dict) -> experiment.ExperimentConfig:
    generation = None
    if args_like.get("model") and args_like.get("endpoint"):
        generation = GenerationParams(model_name=args_like["model"],
                                      endpoint=args_like["endpoint"])
    return experiment.ExperimentConfig(
        setting=experiment.Setting(args_like["setting"]),
        target_language=Language(args_like["target"]),
        source_language=(Language(args_like["source"])
                         if args_like.get("source") else None),
        k=args_like.get("k", 3),
        seed=args_like.get("seed", DEFAULT_SEED),
        mutation=(MutationType(args_like["mutation"])
                  if args_like.get("mutation") else None),
        retriever=(experiment.Retriever(args_like["retriever"])
                   if args_like.get("retriever") else None),
        generation=generation)


def _embed_client(endpoint: str | None) -> retrieve.EmbeddingClient | None:
    if not endpoint:
        return None
    return retrieve.EmbeddingClient(endpoint,
                                    api_key=os.environ.get(EMBED_KEY_ENV))


def cmd_run_cell(args) -> int:
    config = _cell_config({
        "setting": args.setting, "target": args.target.value,
        "source": args.source.value if args.source else None,
        "k": args.k, "seed": args.seed, "mutation": args.mutation,
        "retriever": args.retriever, "model": args.model,
        "endpoint": args.endpoint})
    corpus = _load(args)
    instances = [i for i in load_instances(args.instances)
                 if i.language == config.target_language]
    cell = experiment.run_cell(
        config, corpus, instances,
        embed_client=_embed_client(args.embed_endpoint))
    payload = cell.to_dict()
    text = (f"{config.setting.value} -> {config.target_language.value}: "
            f"pass rate {cell.pass_rate:.2f} over {cell.n_tasks} tasks")
    _emit(payload, args, text)
    return 0


def cmd_run_matrix(args) -> int:
    plan = json.loads(Path(args.plan).read_text())
    configs = []
    for entry in plan:
        entry.setdefault("model", args.model)
        entry.setdefault("endpoint", args.endpoint)
        configs.append(_cell_config(entry))
    corpus = _load(args)
    instances = load_instances(args.instances)
    by_lang = {}
    for inst in instances:
        by_lang.setdefault(inst.language, []).append(inst)
    experiment.run_matrix(configs, corpus, by_lang, args.out,
                          embed_client=_embed_client(args.embed_endpoint))
    print(f"reports written under {args.out}")
    return 0


def cmd_report(args) -> int:
    cell_dir = Path(args.matrix_dir) / "cells"
    if not cell_dir.is_dir():
        print(f"no cell cache under {args.matrix_dir}", file=sys.stderr)
        return 1
    table = experiment.ResultsTable()
    for path in sorted(cell_dir.glob("*.json")):
        data = json.loads(path.read_text())
        config = _cell_config({
            "setting": data["config"]["setting"],
            "target": data["config"]["target_language"],
            "source": data["config"]["source_language"],
            "k": data["config"]["k"], "seed": data["config"]["seed"],
            "mutation": data["config"]["mutation"],
            "retriever": data["config"]["retriever"]})
        cell = experiment._load_cached_cell(path, config)
        if config.setting is experiment.Setting.BASELINE:
            table.baseline[config.target_language] = cell
        else:
            table.cells[experiment.cell_key(config)] = cell
    experiment.write_reports(table, args.matrix_dir)
    return 0


def cmd_pass_at_k(args) -> int:
    value = execute.pass_at_k(args.n, args.c, args.k)
    _emit({"n": args.n, "c": args.c, "k": args.k, "pass_at_k": value},
          args, f"{value:g}")
    return 0


_HANDLERS = {
    "corpus-validate": cmd_corpus_validate,
    "corpus-variant": cmd_corpus_variant,
    "mutate": cmd_mutate,
    "search": cmd_search,
    "index": cmd_index,
    "eval-retrieval": cmd_eval_retrieval,
    "run-cell": cmd_run_cell,
    "run-matrix": cmd_run_matrix,
    "report": cmd_report,
    "pass-at-k": cmd_pass_at_k,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.subcommand](args)
    except (RacglabError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
