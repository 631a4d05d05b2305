"""The 13 supported languages and their lexical profiles.

A profile is the minimal grammar the rest of the package needs: comment
markers, string forms, keywords, and the logic-operator inventory. It is
deliberately not a full grammar; every operation downstream works at the
token or clause level.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Language(str, Enum):
    CPP = "cpp"
    CSHARP = "csharp"
    GO = "go"
    JAVA = "java"
    JAVASCRIPT = "javascript"
    KOTLIN = "kotlin"
    PERL = "perl"
    PHP = "php"
    PYTHON = "python"
    RUBY = "ruby"
    SCALA = "scala"
    SWIFT = "swift"
    TYPESCRIPT = "typescript"

    def __str__(self) -> str:
        return self.value


# Symbolic logic operators shared by the C-family languages.
_SYMBOL_LOGIC = ("&&", "||", "==", "!=", "<=", ">=", "<", ">", "!")

_C_KEYWORDS = {
    "if", "else", "for", "while", "do", "switch", "case", "default", "break",
    "continue", "return", "new", "true", "false", "null", "void", "int",
    "long", "double", "float", "char", "bool", "boolean", "static", "class",
    "public", "private", "protected", "final", "const", "try", "catch",
    "throw", "this",
}


@dataclass(frozen=True)
class LanguageProfile:
    language: Language
    line_comments: tuple[str, ...]
    # (open, close, nestable)
    block_comments: tuple[tuple[str, str, bool], ...]
    # string delimiters tried in order; (delim, escape_with_backslash)
    string_delims: tuple[tuple[str, bool], ...]
    keywords: frozenset[str]
    # logic tokens: symbols matched in the operator stream
    logic_symbols: tuple[str, ...]
    # logic tokens spelled as words (checked against keyword/identifier tokens)
    logic_words: tuple[str, ...]
    # spelling of the else-if construct: tokens of the header
    else_if_forms: tuple[tuple[str, ...], ...]
    continue_keywords: tuple[str, ...]
    uses_braces: bool
    # Ruby =begin/=end and Perl =pod/=cut: line-anchored block comments
    line_anchored_blocks: tuple[tuple[str, str], ...] = ()
    python_docstrings: bool = False
    fence_tags: tuple[str, ...] = ()


def _profile(
    language: Language,
    *,
    line_comments: tuple[str, ...],
    block_comments: tuple[tuple[str, str, bool], ...] = (),
    string_delims: tuple[tuple[str, bool], ...] = (('"', True), ("'", True)),
    keywords: set[str] = _C_KEYWORDS,
    logic_symbols: tuple[str, ...] = _SYMBOL_LOGIC,
    logic_words: tuple[str, ...] = (),
    else_if_forms: tuple[tuple[str, ...], ...] = (("else", "if"),),
    continue_keywords: tuple[str, ...] = ("continue",),
    uses_braces: bool = True,
    line_anchored_blocks: tuple[tuple[str, str], ...] = (),
    python_docstrings: bool = False,
    fence_tags: tuple[str, ...] = (),
) -> LanguageProfile:
    return LanguageProfile(
        language=language,
        line_comments=line_comments,
        block_comments=block_comments,
        string_delims=string_delims,
        keywords=frozenset(keywords),
        logic_symbols=logic_symbols,
        logic_words=logic_words,
        else_if_forms=else_if_forms,
        continue_keywords=continue_keywords,
        uses_braces=uses_braces,
        line_anchored_blocks=line_anchored_blocks,
        python_docstrings=python_docstrings,
        fence_tags=fence_tags or (language.value,),
    )


_C_BLOCK = (("/*", "*/", False),)
_NESTED_BLOCK = (("/*", "*/", True),)

PROFILES: dict[Language, LanguageProfile] = {
    Language.CPP: _profile(
        Language.CPP,
        line_comments=("//",),
        block_comments=_C_BLOCK,
        fence_tags=("cpp", "c++", "cxx"),
    ),
    Language.CSHARP: _profile(
        Language.CSHARP,
        line_comments=("//",),
        block_comments=_C_BLOCK,
        keywords=_C_KEYWORDS | {"using", "namespace", "var", "string", "foreach", "in"},
        fence_tags=("csharp", "cs", "c#"),
    ),
    Language.GO: _profile(
        Language.GO,
        line_comments=("//",),
        block_comments=_C_BLOCK,
        string_delims=(('"', True), ("`", False), ("'", True)),
        keywords={
            "func", "package", "import", "var", "const", "type", "struct",
            "interface", "map", "chan", "go", "defer", "if", "else", "for",
            "range", "switch", "case", "default", "break", "continue",
            "return", "nil", "true", "false", "int", "string", "bool",
            "float64", "make", "len",
        },
        fence_tags=("go", "golang"),
    ),
    Language.JAVA: _profile(
        Language.JAVA,
        line_comments=("//",),
        block_comments=_C_BLOCK,
        keywords=_C_KEYWORDS | {"import", "package", "extends", "implements", "String"},
        fence_tags=("java",),
    ),
    Language.JAVASCRIPT: _profile(
        Language.JAVASCRIPT,
        line_comments=("//",),
        block_comments=_C_BLOCK,
        string_delims=(('"', True), ("'", True), ("`", True)),
        keywords={
            "function", "var", "let", "const", "if", "else", "for", "while",
            "do", "switch", "case", "default", "break", "continue", "return",
            "new", "typeof", "instanceof", "true", "false", "null",
            "undefined", "class", "this", "try", "catch", "throw", "of", "in",
        },
        fence_tags=("javascript", "js"),
    ),
    Language.KOTLIN: _profile(
        Language.KOTLIN,
        line_comments=("//",),
        block_comments=_NESTED_BLOCK,
        string_delims=(('"""', True), ('"', True), ("'", True)),
        keywords={
            "fun", "val", "var", "if", "else", "when", "for", "while", "do",
            "break", "continue", "return", "class", "object", "interface",
            "true", "false", "null", "in", "is", "Int", "String", "Boolean",
        },
        fence_tags=("kotlin", "kt"),
    ),
    Language.PERL: _profile(
        Language.PERL,
        line_comments=("#",),
        keywords={
            "sub", "my", "our", "local", "if", "elsif", "else", "unless",
            "while", "until", "for", "foreach", "next", "last", "redo",
            "return", "use", "package", "print", "die", "defined", "undef",
        },
        logic_symbols=_SYMBOL_LOGIC,
        logic_words=("and", "or", "not"),
        else_if_forms=(("elsif",),),
        continue_keywords=("next",),
        line_anchored_blocks=(("=pod", "=cut"),),
        fence_tags=("perl", "pl"),
    ),
    Language.PHP: _profile(
        Language.PHP,
        line_comments=("//", "#"),
        block_comments=_C_BLOCK,
        keywords={
            "function", "if", "else", "elseif", "for", "foreach", "while",
            "do", "switch", "case", "default", "break", "continue", "return",
            "echo", "new", "class", "public", "private", "static", "true",
            "false", "null", "as", "use", "namespace",
        },
        logic_words=("and", "or"),
        else_if_forms=(("elseif",), ("else", "if")),
        fence_tags=("php",),
    ),
    Language.PYTHON: _profile(
        Language.PYTHON,
        line_comments=("#",),
        string_delims=(('"""', True), ("'''", True), ('"', True), ("'", True)),
        keywords={
            "def", "class", "if", "elif", "else", "for", "while", "break",
            "continue", "return", "pass", "import", "from", "as", "with",
            "try", "except", "finally", "raise", "lambda", "yield", "global",
            "nonlocal", "assert", "del", "True", "False", "None", "and",
            "or", "not", "in", "is",
        },
        logic_symbols=("==", "!=", "<=", ">=", "<", ">"),
        logic_words=("and", "or", "not"),
        else_if_forms=(("elif",),),
        uses_braces=False,
        python_docstrings=True,
        fence_tags=("python", "py", "python3"),
    ),
    Language.RUBY: _profile(
        Language.RUBY,
        line_comments=("#",),
        keywords={
            "def", "end", "if", "elsif", "else", "unless", "case", "when",
            "while", "until", "for", "do", "break", "next", "redo", "return",
            "class", "module", "begin", "rescue", "ensure", "true", "false",
            "nil", "and", "or", "not", "then", "puts", "require",
        },
        logic_words=("and", "or", "not"),
        else_if_forms=(("elsif",),),
        continue_keywords=("next",),
        uses_braces=False,
        line_anchored_blocks=(("=begin", "=end"),),
        fence_tags=("ruby", "rb"),
    ),
    Language.SCALA: _profile(
        Language.SCALA,
        line_comments=("//",),
        block_comments=_NESTED_BLOCK,
        string_delims=(('"""', False), ('"', True), ("'", True)),
        keywords={
            "def", "val", "var", "if", "else", "match", "case", "for",
            "while", "do", "return", "class", "object", "trait", "extends",
            "new", "true", "false", "null", "import", "package", "yield",
            "Int", "String", "Boolean",
        },
        fence_tags=("scala",),
    ),
    Language.SWIFT: _profile(
        Language.SWIFT,
        line_comments=("//",),
        block_comments=_NESTED_BLOCK,
        string_delims=(('"""', True), ('"', True)),
        keywords={
            "func", "let", "var", "if", "else", "guard", "switch", "case",
            "default", "for", "while", "repeat", "break", "continue",
            "return", "class", "struct", "enum", "protocol", "import",
            "true", "false", "nil", "in", "Int", "String", "Bool",
        },
        fence_tags=("swift",),
    ),
    Language.TYPESCRIPT: _profile(
        Language.TYPESCRIPT,
        line_comments=("//",),
        block_comments=_C_BLOCK,
        string_delims=(('"', True), ("'", True), ("`", True)),
        keywords={
            "function", "var", "let", "const", "if", "else", "for", "while",
            "do", "switch", "case", "default", "break", "continue", "return",
            "new", "typeof", "instanceof", "true", "false", "null",
            "undefined", "class", "interface", "type", "number", "string",
            "boolean", "this", "of", "in",
        },
        fence_tags=("typescript", "ts"),
    ),
}


def profile(language: Language) -> LanguageProfile:
    return PROFILES[language]
