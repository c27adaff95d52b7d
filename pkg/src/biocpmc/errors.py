"""Exception hierarchy shared by the converter, serializers and store."""

from __future__ import annotations


class BioCError(Exception):
    """Base class for every error raised by this package."""


class ParseError(BioCError):
    """Input could not be parsed as XML or JSON.

    ``position`` is a ``(line, column)`` pair for XML input and a character
    index for JSON input, whichever the underlying parser reports.
    """

    def __init__(self, message: str, position=None):
        super().__init__(message)
        self.position = position


class UnknownElement(BioCError):
    def __init__(self, name: str, context: str | None = None):
        msg = f"unknown element <{name}>"
        if context:
            msg += f" in <{context}>"
        super().__init__(msg)
        self.name = name
        self.context = context


class MissingField(BioCError):
    def __init__(self, path: str):
        super().__init__(f"missing required field: {path}")
        self.path = path


class TypeMismatch(BioCError):
    def __init__(self, path: str, expected: str, got: object = None):
        msg = f"{path}: expected {expected}"
        if got is not None:
            msg += f", got {type(got).__name__}"
        super().__init__(msg)
        self.path = path
        self.expected = expected


class MissingTypeInfon(BioCError):
    """A passage has no ``type`` infon."""


class EmptyArticle(BioCError):
    """JATS input had neither front matter nor body content to convert."""


class MalformedId(BioCError):
    def __init__(self, raw: str):
        super().__init__(f"malformed article id: {raw!r}")
        self.raw = raw


class UnknownId(BioCError):
    def __init__(self, raw: str):
        super().__init__(f"unknown article id: {raw}")
        self.raw = raw


class NotFound(BioCError):
    def __init__(self, pmcid: str):
        super().__init__(f"document not found: {pmcid}")
        self.pmcid = pmcid


class InvalidDocument(BioCError):
    def __init__(self, message: str, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class ArchiveUnreadable(BioCError):
    pass
