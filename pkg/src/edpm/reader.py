"""Directive reader: extract `#pragma edpm` lines from C source into Directive values.

The reader is deliberately unaware of C syntax; it looks at one physical line
at a time and ignores everything that does not start with the pragma prefix.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .diagnostics import (
    Diagnostic,
    ParseError,
    MALFORMED_CLAUSE,
    MISSING_REGION_NAME,
    TRAILING_GARBAGE,
    UNKNOWN_ACTION,
)

KINDS = ("init", "deinit", "start", "stop")

# A directive line starts (after whitespace) with exactly `#pragma edpm`.
_PRAGMA_PREFIX = re.compile(r"^\s*#pragma\s+edpm(?![A-Za-z0-9_\-])")
_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_\-]*")


@dataclass(frozen=True)
class Clause:
    """One counter selection: a type plus counters (empty = all of the type)."""

    counter_type: str
    counters: tuple[str, ...] = ()


@dataclass(frozen=True)
class Directive:
    kind: str
    region_name: str | None
    clauses: tuple[Clause, ...]
    line: int


@dataclass
class ScanResult:
    directives: list[Directive] = field(default_factory=list)
    errors: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def is_directive_line(line: str) -> bool:
    return bool(_PRAGMA_PREFIX.match(line))


def scan(source_text: str) -> ScanResult:
    """Collect every directive in source-line order, accumulating parse errors."""
    result = ScanResult()
    for number, line in enumerate(source_text.splitlines(), start=1):
        if not is_directive_line(line):
            continue
        try:
            result.directives.append(parse_directive(line, number))
        except ParseError as err:
            result.errors.append(err.diagnostic)
    return result


# Token kinds used by the directive grammar.
_T_IDENT = "ident"
_T_LPAREN = "("
_T_RPAREN = ")"
_T_COMMA = ","
_T_JUNK = "junk"


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "(),":
            tokens.append((ch, ch))
            i += 1
            continue
        m = _IDENT.match(text, i)
        if m:
            tokens.append((_T_IDENT, m.group()))
            i = m.end()
            continue
        tokens.append((_T_JUNK, ch))
        i += 1
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str]], line: int):
        self.tokens = tokens
        self.pos = 0
        self.line = line

    def fail(self, reason: str, message: str) -> ParseError:
        return ParseError(Diagnostic(reason, self.line, message))

    def peek(self) -> tuple[str, str] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> tuple[str, str] | None:
        tok = self.peek()
        if tok is not None:
            self.pos += 1
        return tok

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def require_end(self) -> None:
        if not self.at_end():
            rest = " ".join(t[1] for t in self.tokens[self.pos :])
            raise self.fail(TRAILING_GARBAGE, f"unexpected trailing text {rest!r}")

    def parse_clause(self) -> Clause:
        tok = self.take()
        if tok is None or tok[0] != _T_IDENT:
            found = "end of line" if tok is None else repr(tok[1])
            raise self.fail(MALFORMED_CLAUSE, f"expected a counter type, found {found}")
        type_name = tok[1]
        if self.peek() is None or self.peek()[0] != _T_LPAREN:
            return Clause(type_name)  # bare type means all of its counters
        self.take()
        counters: list[str] = []
        if self.peek() is not None and self.peek()[0] == _T_RPAREN:
            self.take()
            return Clause(type_name)
        while True:
            tok = self.take()
            if tok is None or tok[0] != _T_IDENT:
                found = "end of line" if tok is None else repr(tok[1])
                raise self.fail(MALFORMED_CLAUSE, f"expected a counter name, found {found}")
            counters.append(tok[1])
            sep = self.take()
            if sep is not None and sep[0] == _T_RPAREN:
                break
            if sep is None or sep[0] != _T_COMMA:
                found = "end of line" if sep is None else repr(sep[1])
                raise self.fail(MALFORMED_CLAUSE, f"expected ',' or ')', found {found}")
        return Clause(type_name, tuple(counters))


def parse_directive(line_text: str, line_number: int) -> Directive:
    """Parse one `#pragma edpm` line. Raises ParseError with a reason token."""
    m = _PRAGMA_PREFIX.match(line_text)
    if m is None:
        raise ValueError("parse_directive called on a non-directive line")
    parser = _Parser(_tokenize(line_text[m.end() :]), line_number)

    tok = parser.take()
    if tok is None:
        raise parser.fail(UNKNOWN_ACTION, "missing action after '#pragma edpm'")
    if tok[0] != _T_IDENT or tok[1] not in KINDS:
        raise parser.fail(UNKNOWN_ACTION, f"unrecognized action {tok[1]!r}")
    kind = tok[1]

    if kind in ("init", "deinit"):
        parser.require_end()
        return Directive(kind, None, (), line_number)

    name_tok = parser.take()
    if name_tok is None or name_tok[0] != _T_IDENT:
        raise parser.fail(MISSING_REGION_NAME, f"'{kind}' requires a region name")
    region_name = name_tok[1]

    if kind == "stop":
        parser.require_end()
        return Directive("stop", region_name, (), line_number)

    clauses: list[Clause] = []
    if not parser.at_end():
        clauses.append(parser.parse_clause())
        while parser.peek() is not None and parser.peek()[0] == _T_COMMA:
            parser.take()
            clauses.append(parser.parse_clause())
        parser.require_end()
    return Directive("start", region_name, tuple(clauses), line_number)


def render_directive(directive: Directive) -> str:
    """Render a Directive back to canonical pragma text (round-trips through parse)."""
    parts = ["#pragma edpm", directive.kind]
    if directive.region_name is not None:
        parts.append(directive.region_name)
    text = " ".join(parts)
    if directive.clauses:
        rendered = ", ".join(
            f"{c.counter_type}({', '.join(c.counters)})" for c in directive.clauses
        )
        text = f"{text} {rendered}"
    return text
