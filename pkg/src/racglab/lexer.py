"""Lightweight per-language tokenizer.

Produces a flat token stream with byte spans. Comments and strings are
recognized precisely enough that downstream operations (comment stripping,
mutation site discovery) never touch bytes inside the wrong region. No
grammar beyond that is attempted.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .languages import Language, LanguageProfile, profile

_IDENT_START = frozenset(
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_"
)
_IDENT_CONT = _IDENT_START | frozenset("0123456789")
_DIGITS = frozenset("0123456789")
_HSPACE = frozenset(" \t")


class TokenKind(Enum):
    COMMENT = "comment"
    STRING = "string"
    IDENT = "ident"
    KEYWORD = "keyword"
    NUMBER = "number"
    OP = "op"
    WS = "ws"
    OTHER = "other"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    start: int
    end: int

    def text(self, source: str) -> str:
        return source[self.start:self.end]


@dataclass
class LexResult:
    tokens: list[Token]
    warnings: list[str]


def _at_line_start(source: str, i: int) -> bool:
    return i == 0 or source[i - 1] == "\n"


def _scan_block(source: str, i: int, opener: str, closer: str, nestable: bool,
                warnings: list[str]) -> int:
    """Return end index of the block comment starting at i."""
    depth = 1
    j = i + len(opener)
    n = len(source)
    while j < n:
        if nestable and source.startswith(opener, j):
            depth += 1
            j += len(opener)
        elif source.startswith(closer, j):
            depth -= 1
            j += len(closer)
            if depth == 0:
                return j
        else:
            j += 1
    warnings.append(f"unterminated block comment at offset {i}")
    return n


def _scan_string(source: str, i: int, delim: str, escape: bool,
                 warnings: list[str]) -> int:
    j = i + len(delim)
    n = len(source)
    multiline = len(delim) > 1 or delim == "`"
    while j < n:
        if escape and source[j] == "\\":
            j += 2
            continue
        if source.startswith(delim, j):
            return j + len(delim)
        if not multiline and source[j] == "\n":
            # unterminated single-line literal: stop at the newline
            return j
        j += 1
    warnings.append(f"unterminated string literal at offset {i}")
    return n


def _line_is_anchored(source: str, i: int, marker: str) -> bool:
    if not _at_line_start(source, i):
        return False
    if not source.startswith(marker, i):
        return False
    after = i + len(marker)
    return after >= len(source) or not source[after].isalnum()


def tokenize(code: str, language: Language) -> LexResult:
    prof = profile(language)
    tokens: list[Token] = []
    warnings: list[str] = []
    i = 0
    n = len(code)

    while i < n:
        ch = code[i]

        # line-anchored block comments (=begin/=end, =pod/=cut)
        anchored = None
        for opener, closer in prof.line_anchored_blocks:
            if _line_is_anchored(code, i, opener):
                anchored = (opener, closer)
                break
        if anchored is not None:
            opener, closer = anchored
            j = i + len(opener)
            while j < n:
                if _line_is_anchored(code, j, closer):
                    j += len(closer)
                    # consume the rest of the closer line
                    while j < n and code[j] != "\n":
                        j += 1
                    break
                j += 1
            else:
                warnings.append(f"unterminated block comment at offset {i}")
                j = n
            tokens.append(Token(TokenKind.COMMENT, i, j))
            i = j
            continue

        matched = False
        for opener, closer, nestable in prof.block_comments:
            if code.startswith(opener, i):
                j = _scan_block(code, i, opener, closer, nestable, warnings)
                tokens.append(Token(TokenKind.COMMENT, i, j))
                i = j
                matched = True
                break
        if matched:
            continue

        for marker in prof.line_comments:
            if code.startswith(marker, i):
                j = i
                while j < n and code[j] != "\n":
                    j += 1
                tokens.append(Token(TokenKind.COMMENT, i, j))
                i = j
                matched = True
                break
        if matched:
            continue

        for delim, escape in prof.string_delims:
            if code.startswith(delim, i):
                j = _scan_string(code, i, delim, escape, warnings)
                kind = TokenKind.STRING
                if prof.python_docstrings and len(delim) == 3:
                    if _is_docstring_position(code, tokens, i):
                        kind = TokenKind.COMMENT
                tokens.append(Token(kind, i, j))
                i = j
                matched = True
                break
        if matched:
            continue

        if ch in " \t\r\n":
            j = i
            while j < n and code[j] in " \t\r\n":
                j += 1
            tokens.append(Token(TokenKind.WS, i, j))
            i = j
            continue

        if ch in _IDENT_START:
            j = i
            while j < n and code[j] in _IDENT_CONT:
                j += 1
            word = code[i:j]
            kind = TokenKind.KEYWORD if word in prof.keywords else TokenKind.IDENT
            tokens.append(Token(kind, i, j))
            i = j
            continue

        if ch in _DIGITS:
            j = i
            while j < n and (code[j] in _IDENT_CONT or code[j] == "."):
                j += 1
            tokens.append(Token(TokenKind.NUMBER, i, j))
            i = j
            continue

        op = _match_operator(code, i, prof)
        if op:
            tokens.append(Token(TokenKind.OP, i, i + len(op)))
            i += len(op)
            continue

        tokens.append(Token(TokenKind.OTHER, i, i + 1))
        i += 1

    return LexResult(tokens, warnings)


_OPERATORS = ("<<=", ">>=", "===", "!==", "&&", "||", "==", "!=", "<=", ">=",
              "->", "=>", "::", "++", "--", "+=", "-=", "*=", "/=", "<", ">",
              "!", "=", "+", "-", "*", "/", "%", "&", "|", "^", "~", "?", ":",
              ";", ",", ".", "(", ")", "[", "]", "{", "}")


def _match_operator(code: str, i: int, prof: LanguageProfile) -> str | None:
    for op in _OPERATORS:
        if code.startswith(op, i):
            return op
    return None


_STMT_END_CHARS = _IDENT_CONT | frozenset(")]}\"'")


def _is_docstring_position(code: str, tokens: list[Token], i: int) -> bool:
    """A triple-quoted string is a docstring (stripped as a comment) when it
    opens a statement: first on its line after a completed statement or a
    suite header, or directly after ':' / ';'."""
    j = i - 1
    while j >= 0 and code[j] in _HSPACE:
        j -= 1
    first_on_line = j < 0 or code[j] == "\n"
    prev = None
    for tok in reversed(tokens):
        if tok.kind not in (TokenKind.WS, TokenKind.COMMENT):
            prev = tok
            break
    if prev is None:
        return True  # module docstring
    text = code[prev.start:prev.end]
    if text.endswith(":") or text == ";":
        return True
    if not first_on_line:
        return False
    return text[-1] in _STMT_END_CHARS


def comment_spans(code: str, language: Language) -> tuple[list[tuple[int, int]], list[str]]:
    """Byte spans of all comments, including docstrings for Python."""
    result = tokenize(code, language)
    spans = [(t.start, t.end) for t in result.tokens if t.kind is TokenKind.COMMENT]
    return spans, result.warnings


def strip_comment_text(code: str, language: Language) -> tuple[str, list[str]]:
    """Remove comments; also eat horizontal whitespace left dangling before
    a comment that runs to the end of its line."""
    spans, warnings = comment_spans(code, language)
    if not spans:
        return code, warnings
    remove: list[tuple[int, int]] = []
    for start, end in spans:
        # does the remainder of the line after the comment hold only hspace?
        j = end
        while j < len(code) and code[j] in _HSPACE:
            j += 1
        trailing_blank = j >= len(code) or code[j] == "\n"
        if trailing_blank:
            while start > 0 and code[start - 1] in _HSPACE:
                start -= 1
        remove.append((start, end))
    out = []
    pos = 0
    for start, end in remove:
        if start > pos:
            out.append(code[pos:start])
        pos = max(pos, end)
    out.append(code[pos:])
    return "".join(out), warnings
