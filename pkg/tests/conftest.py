"""Shared fixtures: synthetic corpora, verified task sets, and mock HTTP
services for the embedding and generation endpoints."""

from __future__ import annotations

import hashlib
import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from racglab.corpus import CodeDocument, CodeInstance, Corpus
from racglab.languages import Language

# ---------------------------------------------------------------------------
# snippet corpora (>= 100 docs per language; logic everywhere, control flow
# in most docs so ControlFlow applicability trails LogicalKeyword)

N_SNIPPETS = 100
N_BRANCH_FREE = 5


def _python_snippet(i: int) -> str:
    return (
        f"def helper{i}(a, b):\n"
        f"    total = {i}\n"
        f"    if a == b and a > 1:\n"
        f"        total = a * b + {i}\n"
        f"    elif a < b:\n"
        f"        total = b - a\n"
        f"    else:\n"
        f"        total = a\n"
        f"    for step in range(b):\n"
        f"        if step == a or step > 3:\n"
        f"            continue\n"
        f"        total += step\n"
        f"    return total\n")


def _python_branch_free(i: int) -> str:
    return f"def check{i}(a, b):\n    return a == b and a > {i}\n"


def _java_snippet(i: int) -> str:
    return (
        f"class Helper{i} {{\n"
        f"    static int compute(int a, int b) {{\n"
        f"        int total = {i};\n"
        f"        if (a == b && a > 1) {{\n"
        f"            total = a * b + {i};\n"
        f"        }} else if (a < b) {{\n"
        f"            total = b - a;\n"
        f"        }} else {{\n"
        f"            total = a;\n"
        f"        }}\n"
        f"        for (int step = 0; step < b; step++) {{\n"
        f"            if (step == a || step > 3) {{\n"
        f"                continue;\n"
        f"            }}\n"
        f"            total += step;\n"
        f"        }}\n"
        f"        return total;\n"
        f"    }}\n"
        f"}}\n")


def _java_branch_free(i: int) -> str:
    return (f"class Check{i} {{\n"
            f"    static boolean check(int a, int b) {{\n"
            f"        return a == b && a > {i};\n"
            f"    }}\n"
            f"}}\n")


def _snippet_corpus(language: Language, full, branch_free) -> Corpus:
    docs = []
    for i in range(N_SNIPPETS):
        code = branch_free(i) if i < N_BRANCH_FREE else full(i)
        docs.append(CodeDocument(
            doc_id=f"{language.value}-snip-{i:03d}", language=language,
            code=code, family_id=f"snip{i:03d}",
            nl_comment=_comment_for(language, f"helper routine {i}")))
    return Corpus(documents=docs)


def _comment_for(language: Language, text: str) -> str:
    marker = "#" if language in (Language.PYTHON, Language.RUBY,
                                 Language.PERL) else "//"
    return f"{marker} {text}"


@pytest.fixture(scope="session")
def python_snippet_corpus() -> Corpus:
    return _snippet_corpus(Language.PYTHON, _python_snippet,
                           _python_branch_free)


@pytest.fixture(scope="session")
def java_snippet_corpus() -> Corpus:
    return _snippet_corpus(Language.JAVA, _java_snippet, _java_branch_free)


# ---------------------------------------------------------------------------
# verified Python tasks: reference solutions whose logic operators are all
# load-bearing under the bundled test harnesses

N_TASKS = 50

_UNIQUE_WORDS = [
    "amber", "basil", "cedar", "delta", "ember", "fjord", "gleam", "harbor",
    "indigo", "jasper", "kelp", "lagoon", "maple", "nectar", "onyx", "plume",
    "quartz", "raven", "sable", "tundra", "umber", "velvet", "willow",
    "xenon", "yarrow", "zephyr", "argon", "breeze", "cobalt", "drift",
    "echo", "flint", "grove", "haze", "iris", "jade", "krill", "lumen",
    "mirth", "nimbus", "opal", "pearl", "quill", "ridge", "slate", "thorn",
    "ultra", "vapor", "wren", "yield0",
]


def _task_solution(i: int) -> str:
    return (f"def solve{i}(a, b):\n"
            f"    if a == b and a > 0:\n"
            f"        return a * b + {i}\n"
            f"    if a < b:\n"
            f"        return b - a + {i}\n"
            f"    return a * 2 + {i}\n")


def _task_tests(i: int) -> str:
    return (f"import sys\n"
            f"try:\n"
            f"    assert solve{i}(3, 3) == 9 + {i}\n"
            f"    assert solve{i}(1, 5) == 4 + {i}\n"
            f"    assert solve{i}(5, 1) == 10 + {i}\n"
            f"    assert solve{i}(2, 2) == 4 + {i}\n"
            f"except AssertionError:\n"
            f"    sys.exit(1)\n"
            f"except Exception:\n"
            f"    sys.exit(2)\n"
            f"sys.exit(0)\n")


def _task_prompt(i: int) -> str:
    return (f"compute the {_UNIQUE_WORDS[i]} blend of two integers, "
            f"variant {i}")


@pytest.fixture(scope="session")
def verified_instances() -> list[CodeInstance]:
    return [CodeInstance(
        instance_id=f"task-{i:03d}", language=Language.PYTHON,
        nl_prompt=_task_prompt(i), reference_solution=_task_solution(i),
        test_cases=_task_tests(i), entry_point=f"solve{i}",
        family_id=f"fam{i:03d}") for i in range(N_TASKS)]


@pytest.fixture(scope="session")
def task_corpus(verified_instances) -> Corpus:
    """One golden Python document per task family; comment = the prompt."""
    docs = []
    golden = {}
    for inst in verified_instances:
        doc_id = f"doc-{inst.family_id}"
        docs.append(CodeDocument(
            doc_id=doc_id, language=Language.PYTHON,
            code=inst.reference_solution, family_id=inst.family_id,
            nl_comment=f"# {inst.nl_prompt}"))
        golden[(inst.family_id, Language.PYTHON)] = doc_id
    return Corpus(documents=docs, golden=golden)


# ---------------------------------------------------------------------------
# 50-doc self-retrieval corpus: each comment carries terms unique to its doc


@pytest.fixture(scope="session")
def self_retrieval_corpus() -> Corpus:
    docs = []
    golden = {}
    for i in range(50):
        word = _UNIQUE_WORDS[i]
        doc_id = f"sr-{i:03d}"
        docs.append(CodeDocument(
            doc_id=doc_id, language=Language.PYTHON,
            code=f"def run{i}(n):\n    return n + {i}\n",
            family_id=f"srfam{i:03d}",
            nl_comment=f"# {word}{i}alpha routine over {word}{i}beta values"))
        golden[(f"srfam{i:03d}", Language.PYTHON)] = doc_id
    return Corpus(documents=docs, golden=golden)


# ---------------------------------------------------------------------------
# comment-form fixture across all 13 languages

def _comment_snippets() -> list[tuple[Language, str]]:
    c_like = lambda lang: [
        (lang, "int a = 1; // trailing note\nint b = 2;\n"),
        (lang, "/* block\n   comment */\nint c = 3;\n"),
        (lang, 'char* s = "// not a comment"; // real\n'),
        (lang, "int d = 4; /* mid */ int e = 5;\n"),
    ]
    snippets: list[tuple[Language, str]] = []
    for lang in (Language.CPP, Language.CSHARP, Language.GO, Language.JAVA,
                 Language.JAVASCRIPT, Language.TYPESCRIPT):
        snippets.extend(c_like(lang))
    for lang in (Language.KOTLIN, Language.SCALA, Language.SWIFT):
        snippets.extend([
            (lang, "val a = 1 // note\n"),
            (lang, "/* outer /* inner */ still outer */\nval b = 2\n"),
            (lang, 'val s = "/* not a comment */" // real\n'),
            (lang, "// full line\nval c = 3\n"),
        ])
    snippets.extend([
        (Language.PYTHON, "x = 1  # trailing\ny = 2\n"),
        (Language.PYTHON, '"""module docstring"""\nz = 3\n'),
        (Language.PYTHON,
         'def f():\n    """doc"""\n    return "# not a comment"\n'),
        (Language.PYTHON, "# full line\na = '# also not'\n"),
        (Language.RUBY, "x = 1 # trailing\n"),
        (Language.RUBY, "=begin\nblock comment\n=end\ny = 2\n"),
        (Language.RUBY, 's = "# not a comment" # real\n'),
        (Language.PERL, "my $x = 1; # trailing\n"),
        (Language.PERL, "=pod\ndocumentation\n=cut\nmy $y = 2;\n"),
        (Language.PERL, 'my $s = "# not a comment"; # real\n'),
        (Language.PHP, "$a = 1; // slash note\n"),
        (Language.PHP, "$b = 2; # hash note\n"),
        (Language.PHP, "/* block */ $c = 3;\n"),
        (Language.PHP, '$s = "# not a comment"; // real\n'),
    ])
    return snippets


@pytest.fixture(scope="session")
def comment_fixture() -> list[tuple[Language, str]]:
    snippets = _comment_snippets()
    assert len(snippets) >= 50
    assert {lang for lang, _ in snippets} == set(Language)
    return snippets


# ---------------------------------------------------------------------------
# mock services


def hash_vector(text: str, dim: int = 8) -> list[float]:
    """Deterministic pseudo-embedding: first line of the text, hashed."""
    first = text.split("\n", 1)[0].lstrip("#/ ").strip()
    digest = hashlib.sha256(first.encode("utf-8")).digest()
    return [digest[j] / 255.0 + 0.01 for j in range(dim)]


class _MockHandler(BaseHTTPRequestHandler):
    def log_message(self, *args):  # quiet
        pass

    def _payload(self):
        length = int(self.headers.get("Content-Length", "0"))
        return json.loads(self.rfile.read(length))

    def _reply(self, status: int, obj) -> None:
        body = json.dumps(obj).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self):
        server = self.server
        server.requests.append(self.path)
        if self.path == "/embed":
            if server.fail_status:
                self._reply(server.fail_status, {"error": "induced failure"})
                return
            texts = self._payload()["texts"]
            self._reply(200, {"vectors": [hash_vector(t) for t in texts]})
        elif self.path == "/chat/completions":
            if server.fail_status:
                self._reply(server.fail_status, {"error": "induced failure"})
                return
            prompt = self._payload()["messages"][0]["content"]
            self._reply(200, {"choices": [{"message": {
                "content": server.generator(prompt)}}]})
        else:
            self._reply(404, {"error": "unknown path"})


def echo_top_doc(prompt: str) -> str:
    """Mock generator: echo the first fenced code block of the prompt."""
    match = re.search(r"```[^\n]*\n(.*?)```", prompt, re.DOTALL)
    if match is None:
        return "```python\npass\n```"
    return "```python\n" + match.group(1) + "```"


class MockServer:
    def __init__(self, generator=echo_top_doc):
        self.httpd = ThreadingHTTPServer(("127.0.0.1", 0), _MockHandler)
        self.httpd.requests = []
        self.httpd.fail_status = None
        self.httpd.generator = generator
        self.thread = threading.Thread(target=self.httpd.serve_forever,
                                       daemon=True)
        self.thread.start()

    @property
    def endpoint(self) -> str:
        host, port = self.httpd.server_address
        return f"http://{host}:{port}"

    def set_failure(self, status: int | None) -> None:
        self.httpd.fail_status = status

    @property
    def requests(self) -> list[str]:
        return self.httpd.requests

    def close(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()


@pytest.fixture()
def mock_server():
    server = MockServer()
    yield server
    server.close()
