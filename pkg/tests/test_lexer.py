"""Lexer and comment-stripping behavior."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from racglab.languages import Language
from racglab.lexer import TokenKind, comment_spans, strip_comment_text, tokenize


def kinds(code, language):
    return [(t.kind, t.text(code)) for t in tokenize(code, language).tokens
            if t.kind is not TokenKind.WS]


class TestTokenize:
    def test_spans_partition_input(self):
        code = "def f(x):\n    # note\n    return x + 'a'\n"
        tokens = tokenize(code, Language.PYTHON).tokens
        pos = 0
        for tok in tokens:
            assert tok.start == pos
            assert tok.end > tok.start
            pos = tok.end
        assert pos == len(code)

    def test_keyword_vs_identifier(self):
        out = kinds("return value", Language.PYTHON)
        assert out == [(TokenKind.KEYWORD, "return"),
                       (TokenKind.IDENT, "value")]

    def test_line_comment_runs_to_eol(self):
        out = kinds("x = 1 # tail\ny", Language.PYTHON)
        assert (TokenKind.COMMENT, "# tail") in out
        assert (TokenKind.IDENT, "y") in out

    def test_comment_marker_inside_string(self):
        out = kinds('s = "# not"', Language.PYTHON)
        assert all(k is not TokenKind.COMMENT for k, _ in out)

    def test_string_marker_inside_comment(self):
        out = kinds('// "quoted"\nx', Language.JAVA)
        assert out[0] == (TokenKind.COMMENT, '// "quoted"')

    def test_escaped_quote_stays_in_string(self):
        out = kinds(r'"a\"b"', Language.JAVA)
        assert out == [(TokenKind.STRING, r'"a\"b"')]

    def test_nested_block_comment_kotlin(self):
        code = "/* a /* b */ c */ val x"
        out = kinds(code, Language.KOTLIN)
        assert out[0] == (TokenKind.COMMENT, "/* a /* b */ c */")

    def test_unnested_block_comment_java(self):
        code = "/* a /* b */ int x;"
        out = kinds(code, Language.JAVA)
        assert out[0] == (TokenKind.COMMENT, "/* a /* b */")

    def test_unterminated_block_warns(self):
        result = tokenize("/* open forever", Language.CPP)
        assert result.warnings
        assert result.tokens[0].kind is TokenKind.COMMENT

    def test_ruby_anchored_block(self):
        code = "x = 1\n=begin\nnotes\n=end\ny = 2\n"
        spans, _ = comment_spans(code, Language.RUBY)
        assert len(spans) == 1
        start, end = spans[0]
        assert code[start:].startswith("=begin")

    def test_perl_pod_block(self):
        code = "my $x;\n=pod\ndocs\n=cut\nmy $y;\n"
        spans, _ = comment_spans(code, Language.PERL)
        assert len(spans) == 1

    def test_multi_char_operator_greedy(self):
        out = kinds("a <= b", Language.JAVA)
        assert (TokenKind.OP, "<=") in out
        assert (TokenKind.OP, "<") not in out


class TestPythonDocstrings:
    def test_module_docstring_is_comment(self):
        spans, _ = comment_spans('"""top"""\nx = 1\n', Language.PYTHON)
        assert spans

    def test_def_docstring_is_comment(self):
        code = 'def f():\n    """doc"""\n    return 1\n'
        spans, _ = comment_spans(code, Language.PYTHON)
        assert len(spans) == 1

    def test_triple_string_in_expression_is_not_comment(self):
        code = 'x = """data"""\n'
        spans, _ = comment_spans(code, Language.PYTHON)
        assert spans == []

    def test_docstring_after_statement(self):
        code = 'x = 1\n"""floating note"""\ny = 2\n'
        spans, _ = comment_spans(code, Language.PYTHON)
        assert len(spans) == 1


class TestStripCommentText:
    def test_trailing_comment_and_its_padding_removed(self):
        assert strip_comment_text("x = 1  # note\n", Language.PYTHON)[0] == "x = 1\n"

    def test_inline_block_keeps_surrounding_code(self):
        out, _ = strip_comment_text("/* a */ int x; // b\n", Language.CPP)
        assert out == " int x;\n"

    def test_no_comments_is_identity(self):
        code = 'print("hello # world")\n'
        assert strip_comment_text(code, Language.PYTHON)[0] == code

    def test_idempotent(self):
        code = "x = 1  # one\n# two\n/regex/\n"
        once, _ = strip_comment_text(code, Language.PYTHON)
        twice, _ = strip_comment_text(once, Language.PYTHON)
        assert once == twice

    @pytest.mark.parametrize("language", list(Language))
    def test_strip_never_grows(self, language):
        code = "value = 1\n"
        out, _ = strip_comment_text(code, language)
        assert len(out) <= len(code)


@st.composite
def _python_like(draw):
    lines = draw(st.lists(st.sampled_from([
        "x = 1", "y = x + 2", "# a comment", "z = 'text # inside'",
        "if x > 0:", "    pass", "w = 3  # trailing",
    ]), min_size=1, max_size=12))
    return "\n".join(lines) + "\n"


class TestProperties:
    @settings(max_examples=60, deadline=None)
    @given(_python_like())
    def test_tokens_cover_input(self, code):
        tokens = tokenize(code, Language.PYTHON).tokens
        assert "".join(t.text(code) for t in tokens) == code

    @settings(max_examples=60, deadline=None)
    @given(_python_like())
    def test_strip_is_idempotent(self, code):
        once, _ = strip_comment_text(code, Language.PYTHON)
        assert strip_comment_text(once, Language.PYTHON)[0] == once

    @settings(max_examples=60, deadline=None)
    @given(_python_like())
    def test_stripped_output_has_no_comment_tokens(self, code):
        once, _ = strip_comment_text(code, Language.PYTHON)
        spans, _ = comment_spans(once, Language.PYTHON)
        assert spans == []
