"""The four adversarial mutation operators.

All operators work on the token stream of the lightweight lexer: they never
touch bytes inside comments, and the semantic operators (logic inversion,
clause deletion) never touch bytes inside string literals. Site selection is
driven by a counter-based PRNG keyed per document, so a document's mutation
is reproducible no matter which batch it travels in.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .corpus import CodeDocument, Corpus
from .errors import EmptySelection
from .languages import Language, profile
from .lexer import Token, TokenKind, tokenize

DEFAULT_SEED = 42

# Fixed involution table for logic tokens; `not` and `!` are deleted.
LOGIC_SWAP = {
    "and": "or", "or": "and",
    "&&": "||", "||": "&&",
    "==": "!=", "!=": "==",
    "<": ">=", ">=": "<",
    ">": "<=", "<=": ">",
}
LOGIC_DELETE = {"not", "!"}


class MutationType(str, Enum):
    LOGICAL_KEYWORD = "logical"
    CONTROL_FLOW = "controlflow"
    SYNTAX = "syntax"
    LEXICON = "lexicon"


class SiteKind(str, Enum):
    LOGIC_OPERATOR = "logic_operator"
    BRANCH_CLAUSE = "branch_clause"
    IDENTIFIER_CHAR = "identifier_char"
    IDENTIFIER = "identifier"
    STRING_CONSTANT = "string_constant"
    KEYWORD = "keyword"


@dataclass(frozen=True)
class MutationSite:
    start: int
    end: int
    kind: SiteKind
    token_text: str


@dataclass(frozen=True)
class MutationRecord:
    doc_id: str
    mutation: MutationType
    site: MutationSite | None
    original: str
    mutated: str
    seed: int
    applied: bool


def fnv1a64(data: str) -> int:
    """64-bit FNV-1a hash."""
    h = 0xCBF29CE484222325
    for byte in data.encode("utf-8"):
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def document_seed(seed: int, doc_id: str) -> int:
    return (seed ^ fnv1a64(doc_id)) & 0xFFFFFFFFFFFFFFFF


def _rng(sub_seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=sub_seed))


def find_sites(code: str, language: Language,
               mutation: MutationType) -> list[MutationSite]:
    tokens = tokenize(code, language).tokens
    if mutation is MutationType.LOGICAL_KEYWORD:
        return _logic_sites(code, language, tokens)
    if mutation is MutationType.CONTROL_FLOW:
        return _control_flow_sites(code, language, tokens)
    if mutation is MutationType.SYNTAX:
        return _syntax_sites(code, tokens)
    return _lexicon_sites(code, language, tokens)


def _logic_sites(code: str, language: Language,
                 tokens: list[Token]) -> list[MutationSite]:
    prof = profile(language)
    symbols = set(prof.logic_symbols)
    words = set(prof.logic_words)
    sites = []
    for tok in tokens:
        text = tok.text(code)
        if tok.kind is TokenKind.OP and text in symbols:
            sites.append(MutationSite(tok.start, tok.end,
                                      SiteKind.LOGIC_OPERATOR, text))
        elif tok.kind in (TokenKind.KEYWORD, TokenKind.IDENT) and text in words:
            sites.append(MutationSite(tok.start, tok.end,
                                      SiteKind.LOGIC_OPERATOR, text))
    return sites


def _significant(tokens: list[Token], idx: int, step: int = 1) -> int | None:
    """Index of the next non-ws/comment token from idx+step onward."""
    j = idx + step
    while 0 <= j < len(tokens):
        if tokens[j].kind not in (TokenKind.WS, TokenKind.COMMENT):
            return j
        j += step
    return None


def _control_flow_sites(code: str, language: Language,
                        tokens: list[Token]) -> list[MutationSite]:
    prof = profile(language)
    sites: list[MutationSite] = []
    else_if_heads: list[int] = []  # token indices of else-if headers
    bare_else: list[int] = []
    single_forms = {form[0] for form in prof.else_if_forms if len(form) == 1}

    for i, tok in enumerate(tokens):
        if tok.kind is not TokenKind.KEYWORD:
            continue
        text = tok.text(code)
        if text in single_forms:
            else_if_heads.append(i)
        elif text == "else":
            nxt = _significant(tokens, i)
            if (("else", "if") in prof.else_if_forms and nxt is not None
                    and tokens[nxt].kind is TokenKind.KEYWORD
                    and tokens[nxt].text(code) == "if"):
                else_if_heads.append(i)
            else:
                bare_else.append(i)
        elif text in prof.continue_keywords:
            end = tok.end
            nxt = _significant(tokens, i)
            if nxt is not None and tokens[nxt].text(code) == ";":
                end = tokens[nxt].end
            sites.append(MutationSite(tok.start, end, SiteKind.KEYWORD, text))

    heads = else_if_heads if else_if_heads else bare_else
    for i in heads:
        span = _clause_span(code, language, tokens, i)
        if span is not None:
            sites.append(MutationSite(span[0], span[1],
                                      SiteKind.BRANCH_CLAUSE,
                                      tokens[i].text(code)))
    sites.sort(key=lambda s: (s.start, s.end))
    return sites


def _clause_span(code: str, language: Language, tokens: list[Token],
                 head_idx: int) -> tuple[int, int] | None:
    prof = profile(language)
    head = tokens[head_idx]
    if prof.uses_braces:
        # span = header .. matching close brace of the clause block
        depth = 0
        opened = False
        for tok in tokens[head_idx:]:
            if tok.kind is not TokenKind.OP:
                continue
            text = tok.text(code)
            if text == "{":
                depth += 1
                opened = True
            elif text == "}":
                depth -= 1
                if opened and depth == 0:
                    return head.start, tok.end
        return None
    if language is Language.PYTHON:
        return _indent_clause_span(code, head.start)
    # Ruby: elsif/else clause runs until the next elsif/else/end keyword
    for tok in tokens[head_idx + 1:]:
        if tok.kind is TokenKind.KEYWORD and tok.text(code) in ("elsif", "else", "end"):
            return head.start, tok.start
    return None


def _indent_clause_span(code: str, head_start: int) -> tuple[int, int] | None:
    # whole-line span: header line plus every deeper-indented line below it
    line_start = code.rfind("\n", 0, head_start) + 1
    header_indent = head_start - line_start
    pos = code.find("\n", head_start)
    if pos == -1:
        return line_start, len(code)
    end = pos + 1
    while end < len(code):
        nl = code.find("\n", end)
        line_end = len(code) if nl == -1 else nl + 1
        line = code[end:line_end]
        stripped = line.strip()
        if stripped:
            indent = len(line) - len(line.lstrip(" \t"))
            if indent <= header_indent:
                break
        end = line_end
    return line_start, end


def _syntax_sites(code: str, tokens: list[Token]) -> list[MutationSite]:
    sites = []
    for tok in tokens:
        if tok.kind is not TokenKind.IDENT:
            continue
        for pos in range(tok.start, tok.end):
            ch = code[pos]
            if ch.islower():
                sites.append(MutationSite(pos, pos + 1,
                                          SiteKind.IDENTIFIER_CHAR, ch))
    return sites


def _lexicon_sites(code: str, language: Language,
                   tokens: list[Token]) -> list[MutationSite]:
    sites = []
    for tok in tokens:
        text = tok.text(code)
        if tok.kind is TokenKind.IDENT:
            sites.append(MutationSite(tok.start, tok.end,
                                      SiteKind.IDENTIFIER, text))
        elif tok.kind is TokenKind.STRING and len(text) > 2:
            sites.append(MutationSite(tok.start, tok.end,
                                      SiteKind.STRING_CONSTANT, text))
        elif tok.kind is TokenKind.KEYWORD:
            sites.append(MutationSite(tok.start, tok.end,
                                      SiteKind.KEYWORD, text))
    return sites


_LETTERS = string.ascii_lowercase
_ALNUM = string.ascii_letters + string.digits


def _fresh_identifier(rng: np.random.Generator, avoid: str) -> str:
    while True:
        name = "".join(rng.choice(list(_LETTERS), size=8))
        if name != avoid:
            return name


def _string_delim_len(text: str) -> int:
    for delim in ('"""', "'''"):
        if text.startswith(delim) and text.endswith(delim) and len(text) >= 6:
            return 3
    return 1


def apply_mutation(doc: CodeDocument, mutation: MutationType,
                   seed: int = DEFAULT_SEED) -> MutationRecord:
    """Apply one operator at one pseudo-randomly chosen site.

    The effective seed mixes the caller's seed with a hash of doc_id, so the
    outcome for a document does not depend on batch composition.
    """
    sub_seed = document_seed(seed, doc.doc_id)
    sites = find_sites(doc.code, doc.language, mutation)
    if not sites:
        return MutationRecord(doc.doc_id, mutation, None, doc.code,
                              doc.code, sub_seed, applied=False)
    rng = _rng(sub_seed)

    if mutation is MutationType.LEXICON:
        site, mutated = _apply_lexicon(doc.code, sites, rng)
    else:
        site = sites[int(rng.integers(len(sites)))]
        if mutation is MutationType.LOGICAL_KEYWORD:
            repl = "" if site.token_text in LOGIC_DELETE else LOGIC_SWAP[site.token_text]
            mutated = doc.code[:site.start] + repl + doc.code[site.end:]
        elif mutation is MutationType.SYNTAX:
            mutated = (doc.code[:site.start] + site.token_text.upper()
                       + doc.code[site.end:])
        else:  # CONTROL_FLOW: delete the clause or keyword outright
            mutated = doc.code[:site.start] + doc.code[site.end:]

    return MutationRecord(doc.doc_id, mutation, site, doc.code, mutated,
                          sub_seed, applied=mutated != doc.code)


def _apply_lexicon(code: str, sites: list[MutationSite],
                   rng: np.random.Generator) -> tuple[MutationSite, str]:
    groups = {
        SiteKind.IDENTIFIER: [s for s in sites if s.kind is SiteKind.IDENTIFIER],
        SiteKind.STRING_CONSTANT: [s for s in sites
                                   if s.kind is SiteKind.STRING_CONSTANT],
        SiteKind.KEYWORD: [s for s in sites if s.kind is SiteKind.KEYWORD],
    }
    available = [kind for kind in (SiteKind.IDENTIFIER, SiteKind.STRING_CONSTANT,
                                   SiteKind.KEYWORD) if groups[kind]]
    kind = available[int(rng.integers(len(available)))]
    pool = groups[kind]
    site = pool[int(rng.integers(len(pool)))]

    if kind is SiteKind.IDENTIFIER:
        fresh = _fresh_identifier(rng, site.token_text)
        # rename every occurrence of this identifier, back to front
        targets = [s for s in pool if s.token_text == site.token_text]
        mutated = code
        for s in sorted(targets, key=lambda s: -s.start):
            mutated = mutated[:s.start] + fresh + mutated[s.end:]
        return site, mutated
    if kind is SiteKind.STRING_CONSTANT:
        d = _string_delim_len(site.token_text)
        content = site.token_text[d:-d]
        filler = "".join(rng.choice(list(_ALNUM), size=len(content)))
        new_text = site.token_text[:d] + filler + site.token_text[-d:]
        return site, code[:site.start] + new_text + code[site.end:]
    # keyword deletion
    return site, code[:site.start] + code[site.end:]


def perturb_retrieved(docs: list[CodeDocument], mutation: MutationType,
                      seed: int = DEFAULT_SEED
                      ) -> tuple[list[CodeDocument], list[MutationRecord]]:
    """Mutate each document independently; output order matches input."""
    out_docs = []
    records = []
    for doc in docs:
        record = apply_mutation(doc, mutation, seed)
        out_docs.append(replace(doc, code=record.mutated))
        records.append(record)
    return out_docs, records


def applicability_rate(corpus: Corpus, languages: set[Language],
                       mutation: MutationType) -> float:
    docs = [d for d in corpus.documents if d.language in languages]
    if not docs:
        raise EmptySelection(f"no documents in languages {sorted(l.value for l in languages)}")
    hits = sum(1 for d in docs if find_sites(d.code, d.language, mutation))
    return hits / len(docs)
