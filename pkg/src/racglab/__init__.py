"""Toolkit for studying cross-lingual retrieval-augmented code generation
under adversarial corpus perturbations."""

from .corpus import (CodeDocument, CodeInstance, Corpus, Variant,
                     document_text, load_corpus, load_instances, make_variant,
                     save_corpus, save_instances, strip_comments,
                     validate_corpus, validate_instances, verify_solutions)
from .errors import RacglabError
from .execute import (ExecutionResult, LanguageRunner, Verdict,
                      execute_candidate, pass_at_k, probe_toolchains,
                      run_tests)
from .experiment import (CellResult, ExperimentConfig, Retriever, Setting,
                         aggregate_stats, categorize_perturbation_effects,
                         delta_table, run_cell, run_matrix)
from .generate import (GenerationOutcome, GenerationParams, PromptSpec,
                       TemplateId, build_prompt, extract_code, generate_code)
from .languages import Language, LanguageProfile, profile
from .lexer import Token, TokenKind, strip_comment_text, tokenize
from .mutate import (MutationRecord, MutationType, applicability_rate,
                     apply_mutation, document_seed, find_sites,
                     perturb_retrieved)
from .retrieve import (EmbeddingCache, EmbeddingClient, Query,
                       RetrievalResult, SparseIndex, build_index,
                       embed_search, oracle_retrieve, precision_at_k,
                       recall_at_k, search, tokenize_for_retrieval)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
