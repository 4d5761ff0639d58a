"""EDPM: a pragma-driven performance-monitoring precompiler for C programs."""

from __future__ import annotations

from .analyzer import AnalysisResult, analyze, collect_blocks, collect_regions, normalize, validate
from .catalog import CounterId, backend_event, expand_all, resolve_clause
from .codegen import CodeFragment, FileSpec, GenConfig, generate, lower, render
from .diagnostics import Diagnostic, EdpmError, ParseError
from .reader import Clause, Directive, parse_directive, render_directive, scan
from .runner import RunConfig, RunReport, aggregate, loc_report, precompile

__all__ = [
    "AnalysisResult",
    "analyze",
    "collect_blocks",
    "collect_regions",
    "normalize",
    "validate",
    "CounterId",
    "backend_event",
    "expand_all",
    "resolve_clause",
    "CodeFragment",
    "FileSpec",
    "GenConfig",
    "generate",
    "lower",
    "render",
    "Diagnostic",
    "EdpmError",
    "ParseError",
    "Clause",
    "Directive",
    "parse_directive",
    "render_directive",
    "scan",
    "RunConfig",
    "RunReport",
    "aggregate",
    "loc_report",
    "precompile",
]
