"""Prompt construction, the chat-completions client, and code extraction."""

from __future__ import annotations

import hashlib
import logging
import os
import re
from dataclasses import dataclass
from enum import Enum

import requests

from .errors import EmptyResponse, GenerationServiceError
from .languages import Language, profile

log = logging.getLogger(__name__)

API_KEY_ENV = "GENERATION_API_KEY"

LANGUAGE_DISPLAY = {
    Language.CPP: "C++",
    Language.CSHARP: "C#",
    Language.GO: "Go",
    Language.JAVA: "Java",
    Language.JAVASCRIPT: "JavaScript",
    Language.KOTLIN: "Kotlin",
    Language.PERL: "Perl",
    Language.PHP: "PHP",
    Language.PYTHON: "Python",
    Language.RUBY: "Ruby",
    Language.SCALA: "Scala",
    Language.SWIFT: "Swift",
    Language.TYPESCRIPT: "TypeScript",
}


class TemplateId(str, Enum):
    RACG_V1 = "racg_v1"
    BASELINE_V1 = "baseline_v1"


class ExtractionMethod(str, Enum):
    FENCED_TAGGED = "fenced_tagged"
    FENCED_UNTAGGED = "fenced_untagged"
    WHOLE_RESPONSE = "whole_response"


@dataclass(frozen=True)
class PromptSpec:
    query_text: str
    target_language: Language
    context_docs: tuple[tuple[Language, str], ...] = ()
    template_id: TemplateId = TemplateId.RACG_V1

    def __post_init__(self) -> None:
        if self.template_id is TemplateId.BASELINE_V1 and self.context_docs:
            raise ValueError("baseline_v1 takes no context documents")
        if self.template_id is TemplateId.RACG_V1 and not self.context_docs:
            raise ValueError("racg_v1 requires at least one context document")


@dataclass(frozen=True)
class GenerationParams:
    model_name: str
    endpoint: str
    temperature: float = 0.0
    max_tokens: int = 1024
    timeout_s: float = 120.0

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class GenerationOutcome:
    raw_response: str
    extracted_code: str | None
    extraction_method: ExtractionMethod


# Characters of context kept before low-ranked documents get dropped.
DEFAULT_PROMPT_BUDGET = 24_000


def build_prompt(spec: PromptSpec, char_budget: int = DEFAULT_PROMPT_BUDGET
                 ) -> str:
    target = LANGUAGE_DISPLAY[spec.target_language]
    lines = [
        f"You are an expert {target} programmer. "
        f"Write a {target} solution for the task below.",
        "",
    ]
    if spec.context_docs:
        lines.append("Reference code documents (most relevant first):")
        context_lines: list[str] = []
        kept = 0
        used = sum(len(l) for l in lines)
        for lang, text in spec.context_docs:
            block = [f"[{LANGUAGE_DISPLAY[lang]}]",
                     f"```{lang.value}", text, "```", ""]
            size = sum(len(b) + 1 for b in block)
            if kept > 0 and used + size > char_budget:
                log.info("prompt budget reached; dropping %d context docs",
                         len(spec.context_docs) - kept)
                break
            context_lines.extend(block)
            used += size
            kept += 1
        lines.extend(context_lines)
    lines.append("Task:")
    lines.append(spec.query_text)
    lines.append("")
    lines.append(
        f"Answer with a single fenced code block tagged `{spec.target_language.value}` "
        f"containing only the {target} solution.")
    return "\n".join(lines)


def generate_code(params: GenerationParams, prompt: str) -> str:
    """One greedy completion from an OpenAI-compatible chat endpoint."""
    headers = {"Content-Type": "application/json"}
    api_key = os.environ.get(API_KEY_ENV)
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    payload = {
        "model": params.model_name,
        "messages": [{"role": "user", "content": prompt}],
        "temperature": params.temperature,
        "max_tokens": params.max_tokens,
        "n": 1,
    }
    prompt_hash = hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:16]
    try:
        resp = requests.post(f"{params.endpoint.rstrip('/')}/chat/completions",
                             json=payload, headers=headers,
                             timeout=params.timeout_s)
    except requests.Timeout:
        raise GenerationServiceError(0, f"timeout after {params.timeout_s}s")
    except requests.RequestException as exc:
        raise GenerationServiceError(0, str(exc))
    if resp.status_code // 100 != 2:
        raise GenerationServiceError(resp.status_code, resp.text[:200])
    content = resp.json()["choices"][0]["message"]["content"]
    response_hash = hashlib.sha256(content.encode("utf-8")).hexdigest()[:16]
    log.info("generation prompt=%s response=%s model=%s",
             prompt_hash, response_hash, params.model_name)
    return content


_FENCE = re.compile(r"```([^\n`]*)\n(.*?)```", re.DOTALL)


def extract_code(response: str, target_language: Language) -> GenerationOutcome:
    if not response.strip():
        raise EmptyResponse("generation response is empty")
    tags = set(profile(target_language).fence_tags)
    untagged: tuple[str, ExtractionMethod] | None = None
    for match in _FENCE.finditer(response):
        tag = match.group(1).strip().lower()
        body = match.group(2).strip("\n")
        if not body:
            continue
        if tag in tags:
            return GenerationOutcome(response, body,
                                     ExtractionMethod.FENCED_TAGGED)
        if untagged is None:
            untagged = (body, ExtractionMethod.FENCED_UNTAGGED)
    if untagged is not None:
        return GenerationOutcome(response, untagged[0], untagged[1])
    return GenerationOutcome(response, response.strip(),
                             ExtractionMethod.WHOLE_RESPONSE)
