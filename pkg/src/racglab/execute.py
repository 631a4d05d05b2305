"""Sandboxed execution of candidate code against per-instance test
harnesses, and the unbiased Pass@K estimator.

Isolation is subprocess-level: private temp workdir, scrubbed environment,
wall-clock timeout, bounded output capture. Harness convention: exit 0 means
all tests passed, exit 1 means an assertion failed, anything else (or a
signal) is a crash.
"""

from __future__ import annotations

import logging
import os
import shutil
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .corpus import CodeInstance
from .errors import DomainError, SandboxUnavailable
from .languages import Language

log = logging.getLogger(__name__)

OUTPUT_TAIL_BYTES = 4096
DEFAULT_RUN_TIMEOUT_S = 10.0
DEFAULT_COMPILE_TIMEOUT_S = 60.0


class Verdict(str, Enum):
    PASS = "pass"
    COMPILE_ERROR = "compile_error"
    RUNTIME_ERROR = "runtime_error"
    TEST_FAILURE = "test_failure"
    TIMEOUT = "timeout"
    SANDBOX_ERROR = "sandbox_error"


@dataclass(frozen=True)
class ExecutionResult:
    verdict: Verdict
    stdout_tail: str = ""
    stderr_tail: str = ""
    wall_time: float = 0.0


@dataclass(frozen=True)
class LanguageRunner:
    language: Language
    run_cmd: tuple[str, ...]
    file_name: str
    compile_cmd: tuple[str, ...] | None = None
    timeout_s: float = DEFAULT_RUN_TIMEOUT_S
    compile_timeout_s: float = DEFAULT_COMPILE_TIMEOUT_S
    # languages whose harness goes in a separate file get a test_file_name
    test_file_name: str | None = None


DEFAULT_RUNNERS: dict[Language, LanguageRunner] = {
    Language.PYTHON: LanguageRunner(
        Language.PYTHON, run_cmd=(sys.executable, "main.py"),
        compile_cmd=(sys.executable, "-m", "py_compile", "main.py"),
        file_name="main.py"),
    Language.JAVASCRIPT: LanguageRunner(
        Language.JAVASCRIPT, run_cmd=("node", "main.js"),
        compile_cmd=("node", "--check", "main.js"), file_name="main.js"),
    Language.TYPESCRIPT: LanguageRunner(
        Language.TYPESCRIPT,
        run_cmd=("ts-node", "--transpile-only", "main.ts"),
        file_name="main.ts"),
    Language.CPP: LanguageRunner(
        Language.CPP, compile_cmd=("g++", "-std=c++17", "-O0", "-o", "prog",
                                   "main.cpp"),
        run_cmd=("./prog",), file_name="main.cpp"),
    Language.JAVA: LanguageRunner(
        Language.JAVA, compile_cmd=("javac", "Main.java"),
        run_cmd=("java", "Main"), file_name="Main.java"),
    Language.GO: LanguageRunner(
        Language.GO, compile_cmd=("go", "build", "-o", "prog", "main.go"),
        run_cmd=("./prog",), file_name="main.go"),
    Language.CSHARP: LanguageRunner(
        Language.CSHARP, run_cmd=("dotnet", "script", "main.csx"),
        file_name="main.csx"),
    Language.KOTLIN: LanguageRunner(
        Language.KOTLIN,
        compile_cmd=("kotlinc", "main.kt", "-include-runtime", "-d", "main.jar"),
        run_cmd=("java", "-jar", "main.jar"), file_name="main.kt"),
    Language.RUBY: LanguageRunner(
        Language.RUBY, run_cmd=("ruby", "main.rb"), file_name="main.rb"),
    Language.PERL: LanguageRunner(
        Language.PERL, run_cmd=("perl", "main.pl"), file_name="main.pl"),
    Language.PHP: LanguageRunner(
        Language.PHP, run_cmd=("php", "main.php"), file_name="main.php"),
    Language.SCALA: LanguageRunner(
        Language.SCALA, run_cmd=("scala", "main.scala"),
        file_name="main.scala"),
    Language.SWIFT: LanguageRunner(
        Language.SWIFT, compile_cmd=("swiftc", "-o", "prog", "main.swift"),
        run_cmd=("./prog",), file_name="main.swift"),
}


def load_runners(path: str | Path) -> dict[Language, LanguageRunner]:
    """Read a runners.toml registry; unlisted languages keep defaults."""
    try:
        import tomllib  # Python >= 3.11
    except ModuleNotFoundError:
        import tomli as tomllib
    with Path(path).open("rb") as fh:
        data = tomllib.load(fh)
    runners = dict(DEFAULT_RUNNERS)
    for name, cfg in data.items():
        lang = Language(name)
        base = runners[lang]
        runners[lang] = LanguageRunner(
            language=lang,
            run_cmd=tuple(cfg.get("run_cmd", base.run_cmd)),
            compile_cmd=tuple(cfg["compile_cmd"]) if "compile_cmd" in cfg
            else base.compile_cmd,
            file_name=cfg.get("file_name", base.file_name),
            timeout_s=cfg.get("timeout_s", base.timeout_s),
            compile_timeout_s=cfg.get("compile_timeout_s",
                                      base.compile_timeout_s),
            test_file_name=cfg.get("test_file_name", base.test_file_name),
        )
    return runners


def probe_toolchains(runners: dict[Language, LanguageRunner] | None = None
                     ) -> dict[Language, bool]:
    """Which languages have a usable toolchain on this host."""
    runners = runners or DEFAULT_RUNNERS
    available = {}
    for lang, runner in runners.items():
        ok = True
        for cmd in (runner.compile_cmd, runner.run_cmd):
            if not cmd:
                continue
            exe = cmd[0]
            if exe.startswith("./"):
                continue  # produced by the compile step
            if shutil.which(exe) is None:
                ok = False
        available[lang] = ok
    return available


def assemble_program(code: str, instance: CodeInstance,
                     runner: LanguageRunner | None = None) -> dict[str, str]:
    """File name -> contents for one candidate run. Single-file
    concatenation of candidate code and harness unless the runner declares a
    separate test file."""
    runner = runner or DEFAULT_RUNNERS[instance.language]
    combined = code.rstrip("\n") + "\n\n" + instance.test_cases.lstrip("\n")
    if runner.test_file_name:
        return {runner.file_name: code,
                runner.test_file_name: instance.test_cases}
    return {runner.file_name: combined}


def _tail(data: bytes) -> str:
    return data[-OUTPUT_TAIL_BYTES:].decode("utf-8", errors="replace")


def _scrubbed_env(workdir: str) -> dict[str, str]:
    env = {
        "PATH": os.environ.get("PATH", "/usr/bin:/bin"),
        "HOME": workdir,
        "LANG": "C.UTF-8",
        "TMPDIR": workdir,
    }
    return env


def run_tests(files: dict[str, str], runner: LanguageRunner) -> ExecutionResult:
    exe = (runner.compile_cmd or runner.run_cmd)[0]
    if not exe.startswith("./") and shutil.which(exe) is None:
        raise SandboxUnavailable(f"toolchain missing for {runner.language}: {exe}")
    try:
        workdir = tempfile.mkdtemp(prefix="racglab-")
    except OSError as exc:
        raise SandboxUnavailable(f"cannot create workdir: {exc}")
    started = time.monotonic()
    try:
        for name, contents in files.items():
            Path(workdir, name).write_text(contents, encoding="utf-8")

        if runner.compile_cmd:
            result = _run(runner.compile_cmd, workdir,
                          runner.compile_timeout_s)
            if result is None:
                return ExecutionResult(Verdict.TIMEOUT,
                                       wall_time=time.monotonic() - started)
            if result.returncode != 0:
                return ExecutionResult(Verdict.COMPILE_ERROR,
                                       _tail(result.stdout),
                                       _tail(result.stderr),
                                       time.monotonic() - started)

        result = _run(runner.run_cmd, workdir, runner.timeout_s)
        elapsed = time.monotonic() - started
        if result is None:
            return ExecutionResult(Verdict.TIMEOUT, wall_time=elapsed)
        if result.returncode == 0:
            verdict = Verdict.PASS
        elif result.returncode == 1:
            verdict = Verdict.TEST_FAILURE
        else:
            verdict = Verdict.RUNTIME_ERROR
        return ExecutionResult(verdict, _tail(result.stdout),
                               _tail(result.stderr), elapsed)
    finally:
        shutil.rmtree(workdir, ignore_errors=True)


def _run(cmd: tuple[str, ...], workdir: str,
         timeout_s: float) -> subprocess.CompletedProcess | None:
    try:
        return subprocess.run(
            cmd, cwd=workdir, env=_scrubbed_env(workdir),
            capture_output=True, timeout=timeout_s,
            start_new_session=True)
    except subprocess.TimeoutExpired:
        return None


def execute_candidate(code: str, instance: CodeInstance,
                      runners: dict[Language, LanguageRunner] | None = None
                      ) -> ExecutionResult:
    """Assemble and run one candidate solution for one instance."""
    runners = runners or DEFAULT_RUNNERS
    runner = runners[instance.language]
    files = assemble_program(code, instance, runner)
    return run_tests(files, runner)


def pass_at_k(n: int, c: int, k: int) -> float:
    """Unbiased estimator 1 - C(n-c, k)/C(n, k) in stable product form."""
    if not (0 <= c <= n):
        raise DomainError(f"need 0 <= c <= n, got c={c}, n={n}")
    if not (1 <= k <= n):
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    if n - c < k:
        return 1.0
    prod = 1.0
    for i in range(n - c + 1, n + 1):
        prod *= 1.0 - k / i
    return 1.0 - prod
