"""Diagnostic records shared by the reader, analyzer, and code generator."""

from __future__ import annotations

from dataclasses import dataclass

# Reason tokens, stable across releases so tooling can match on them.
UNKNOWN_ACTION = "UnknownAction"
MISSING_REGION_NAME = "MissingRegionName"
MALFORMED_CLAUSE = "MalformedClause"
TRAILING_GARBAGE = "TrailingGarbage"

UNKNOWN_TYPE = "UnknownType"
UNKNOWN_COUNTER = "UnknownCounter"
UNSUPPORTED_COUNTER = "UnsupportedCounter"

DUPLICATE_INIT = "DuplicateInit"
MISSING_INIT = "MissingInit"
DUPLICATE_DEINIT = "DuplicateDeinit"
MISSING_DEINIT = "MissingDeinit"
DUPLICATE_REGION_NAME = "DuplicateRegionName"
DUPLICATE_COUNTER_SPEC = "DuplicateCounterSpec"
UNMATCHED_STOP = "UnmatchedStop"
UNCLOSED_REGION = "UnclosedRegion"
DIRECTIVE_OUTSIDE_INIT_SPAN = "DirectiveOutsideInitSpan"

POSITION_COLLISION = "PositionCollision"


@dataclass(frozen=True)
class Diagnostic:
    """One reported problem, anchored to a 1-based source line (0 = whole file)."""

    reason: str
    line: int
    message: str

    def render(self, path: str = "") -> str:
        prefix = f"{path}:{self.line}: " if path else f"line {self.line}: "
        return f"{prefix}{self.reason}: {self.message}"

    def __str__(self) -> str:
        return self.render()


class EdpmError(Exception):
    """Base class for errors raised by the precompiler and runner."""


class ParseError(EdpmError):
    """A single directive line could not be parsed."""

    def __init__(self, diagnostic: Diagnostic):
        super().__init__(str(diagnostic))
        self.diagnostic = diagnostic

    @property
    def reason(self) -> str:
        return self.diagnostic.reason

    @property
    def line(self) -> int:
        return self.diagnostic.line


class CatalogError(EdpmError):
    """A clause referenced a counter type or counter outside the catalog."""

    def __init__(self, reason: str, message: str):
        super().__init__(f"{reason}: {message}")
        self.reason = reason
        self.detail = message


class CodegenError(EdpmError):
    """Code generation failed (position collision, unsupported counter)."""

    def __init__(self, reason: str, message: str):
        super().__init__(f"{reason}: {message}")
        self.reason = reason
