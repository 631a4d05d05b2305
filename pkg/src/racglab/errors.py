"""Exception types shared across the package."""


class RacglabError(Exception):
    """Base class for all package errors."""


class ParseError(RacglabError):
    def __init__(self, line_no: int, message: str = "malformed corpus line"):
        self.line_no = line_no
        super().__init__(f"{message} (line {line_no})")


class DuplicateId(RacglabError):
    def __init__(self, doc_id: str):
        self.doc_id = doc_id
        super().__init__(f"duplicate doc_id: {doc_id}")


class EmptySelection(RacglabError):
    """No documents matched a language filter."""


class UnknownDoc(RacglabError):
    def __init__(self, doc_id: str):
        self.doc_id = doc_id
        super().__init__(f"doc_id not in index: {doc_id}")


class MissingGolden(RacglabError):
    def __init__(self, family_id: str, language: str):
        self.family_id = family_id
        self.language = language
        super().__init__(f"no golden document for family {family_id!r} in {language}")


class EmbeddingServiceError(RacglabError):
    def __init__(self, status: int, detail: str = ""):
        self.status = status
        super().__init__(f"embedding service error (status {status}): {detail}")


class DimensionMismatch(RacglabError):
    """Embedding vectors disagree in length."""


class GenerationServiceError(RacglabError):
    def __init__(self, status: int, detail: str = ""):
        self.status = status
        super().__init__(f"generation service error (status {status}): {detail}")


class EmptyResponse(RacglabError):
    """Generation response was empty or whitespace-only."""


class DomainError(RacglabError):
    """Arguments outside an operation's valid domain."""


class SandboxUnavailable(RacglabError):
    """Toolchain missing or sandbox workdir could not be created."""


class MissingBaseline(RacglabError):
    def __init__(self, target: str):
        self.target = target
        super().__init__(f"no baseline cell for target language {target}")


class TaskSetMismatch(RacglabError):
    """Cells being compared do not cover the same task set."""
