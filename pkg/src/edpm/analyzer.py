"""Semantic analysis: validation passes, clause normalization, block and region
discovery, value-index assignment, and lowering to instrumentation directives.

Blocks are maximal consecutive spans during which at least one region is
active. They are discovered by keeping a multiset of active regions: a start
inserts its counter set, a stop removes it, and the block is finalized when
the multiset empties. The multiset (rather than a strict stack) is what lets
overlapping regions share a block.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import catalog
from .catalog import CounterId
from .diagnostics import (
    CatalogError,
    Diagnostic,
    DIRECTIVE_OUTSIDE_INIT_SPAN,
    DUPLICATE_COUNTER_SPEC,
    DUPLICATE_DEINIT,
    DUPLICATE_INIT,
    DUPLICATE_REGION_NAME,
    MISSING_DEINIT,
    MISSING_INIT,
    UNCLOSED_REGION,
    UNMATCHED_STOP,
)
from .reader import Directive

# Instrumentation actions, in the vocabulary consumed by code generation.
LIB_INIT = "lib-init"
LIB_DEINIT = "lib-deinit"
BLOCK_CREATE = "block-create"
BLOCK_START = "block-start"
BLOCK_ACCUMULATE = "block-accumulate"
BLOCK_PAUSE = "block-pause"
BLOCK_RESUME = "block-resume"
BLOCK_STOP_DESTROY = "block-stop-destroy"
REGION_COPY_START = "region-copy-start"
REGION_COMPUTE_EMIT = "region-compute-emit"
REGION_BUMP_TEMPORAL = "region-bump-temporal"


@dataclass(frozen=True)
class ExpandedDirective:
    """A directive with every clause resolved to concrete counter identities."""

    kind: str
    region_name: str | None
    counters: tuple[CounterId, ...]
    line: int


@dataclass(frozen=True)
class Block:
    ordinal: int
    start_line: int
    stop_line: int
    counters: tuple[CounterId, ...]  # canonical catalog order
    eventset_binding: str
    values_binding: str


@dataclass(frozen=True)
class BlockIndex:
    block_ordinal: int
    indices: tuple[int, ...]  # offsets into the owning block's values array


@dataclass(frozen=True)
class RegionInfo:
    name: str
    start_line: int
    stop_line: int
    counters: tuple[CounterId, ...]
    block_index: BlockIndex
    values_binding: str
    temporal_binding: str


@dataclass(frozen=True)
class IrDirective:
    action: str
    target: int | str | None  # block ordinal, region name, or None for lib actions
    line: int


@dataclass
class AnalysisResult:
    blocks: list[Block] = field(default_factory=list)
    region_table: dict[str, RegionInfo] = field(default_factory=dict)
    ir: list[IrDirective] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.diagnostics


def sanitize(name: str) -> str:
    return name.replace("-", "_")


def validate(directives: list[Directive]) -> list[Diagnostic]:
    """Structural checks on the directive list; empty result means valid."""
    diags: list[Diagnostic] = []

    inits = [d for d in directives if d.kind == "init"]
    deinits = [d for d in directives if d.kind == "deinit"]
    if not inits:
        diags.append(Diagnostic(MISSING_INIT, 0, "no init directive in file"))
    if not deinits:
        diags.append(Diagnostic(MISSING_DEINIT, 0, "no deinit directive in file"))
    for extra in inits[1:]:
        diags.append(
            Diagnostic(
                DUPLICATE_INIT,
                extra.line,
                f"init already given at line {inits[0].line}",
            )
        )
    for extra in deinits[1:]:
        diags.append(
            Diagnostic(
                DUPLICATE_DEINIT,
                extra.line,
                f"deinit already given at line {deinits[0].line}",
            )
        )

    seen_starts: dict[str, int] = {}
    open_regions: dict[str, int] = {}
    for d in directives:
        if d.kind == "start":
            if d.region_name in seen_starts:
                diags.append(
                    Diagnostic(
                        DUPLICATE_REGION_NAME,
                        d.line,
                        f"region {d.region_name!r} already started at line "
                        f"{seen_starts[d.region_name]}",
                    )
                )
                continue
            seen_starts[d.region_name] = d.line
            open_regions[d.region_name] = d.line
            diags.extend(_check_clause_uniqueness(d))
        elif d.kind == "stop":
            if d.region_name in open_regions:
                del open_regions[d.region_name]
            else:
                diags.append(
                    Diagnostic(
                        UNMATCHED_STOP,
                        d.line,
                        f"stop for region {d.region_name!r} has no open start",
                    )
                )
    for name, line in open_regions.items():
        diags.append(
            Diagnostic(UNCLOSED_REGION, line, f"region {name!r} is never stopped")
        )

    if len(inits) == 1 and len(deinits) == 1:
        init_line, deinit_line = inits[0].line, deinits[0].line
        if deinit_line < init_line:
            diags.append(
                Diagnostic(
                    DIRECTIVE_OUTSIDE_INIT_SPAN,
                    deinit_line,
                    f"deinit precedes init (line {init_line})",
                )
            )
        else:
            for d in directives:
                if d.kind in ("start", "stop") and not (
                    init_line < d.line < deinit_line
                ):
                    diags.append(
                        Diagnostic(
                            DIRECTIVE_OUTSIDE_INIT_SPAN,
                            d.line,
                            f"{d.kind} {d.region_name!r} lies outside the "
                            f"init/deinit span ({init_line}..{deinit_line})",
                        )
                    )

    diags.sort(key=lambda diag: diag.line)
    return diags


def _check_clause_uniqueness(directive: Directive) -> list[Diagnostic]:
    diags = []
    seen_types: set[str] = set()
    for clause in directive.clauses:
        if clause.counter_type in seen_types:
            diags.append(
                Diagnostic(
                    DUPLICATE_COUNTER_SPEC,
                    directive.line,
                    f"region {directive.region_name!r} repeats type "
                    f"{clause.counter_type!r}",
                )
            )
        seen_types.add(clause.counter_type)
        seen_counters: set[str] = set()
        for counter in clause.counters:
            if counter in seen_counters:
                diags.append(
                    Diagnostic(
                        DUPLICATE_COUNTER_SPEC,
                        directive.line,
                        f"region {directive.region_name!r} repeats counter "
                        f"{clause.counter_type}.{counter}",
                    )
                )
            seen_counters.add(counter)
    return diags


def normalize(
    directives: list[Directive],
) -> tuple[list[ExpandedDirective], list[Diagnostic]]:
    """Resolve all clauses through the catalog; clause-less starts get the full catalog."""
    expanded: list[ExpandedDirective] = []
    diags: list[Diagnostic] = []
    for d in directives:
        counters: tuple[CounterId, ...] = ()
        if d.kind == "start":
            if not d.clauses:
                counters = catalog.expand_all()
            else:
                resolved: list[CounterId] = []
                for clause in d.clauses:
                    try:
                        resolved.extend(catalog.resolve_clause(clause))
                    except CatalogError as err:
                        diags.append(Diagnostic(err.reason, d.line, err.detail))
                counters = catalog.sort_counters(resolved)
        expanded.append(ExpandedDirective(d.kind, d.region_name, counters, d.line))
    return expanded, diags


def collect_blocks(expanded: list[ExpandedDirective]) -> list[Block]:
    """Find maximal consecutive instrumented spans and their union counter sets."""
    blocks: list[Block] = []
    active: dict[str, tuple[CounterId, ...]] = {}
    union: set[CounterId] = set()
    block_start = 0
    for d in expanded:
        if d.kind == "start":
            if not active:
                block_start = d.line
                union = set()
            active[d.region_name] = d.counters
            union.update(d.counters)
        elif d.kind == "stop":
            del active[d.region_name]
            if not active:
                ordinal = len(blocks)
                blocks.append(
                    Block(
                        ordinal=ordinal,
                        start_line=block_start,
                        stop_line=d.line,
                        counters=catalog.sort_counters(union),
                        eventset_binding=f"__edpm_es_{ordinal}",
                        values_binding=f"__edpm_bv_{ordinal}",
                    )
                )
    return blocks


def collect_regions(
    expanded: list[ExpandedDirective], blocks: list[Block]
) -> tuple[dict[str, RegionInfo], list[IrDirective]]:
    """Assign per-region value indices and lower every directive to instrumentation actions.

    A start seen with no active regions opens the block (3 actions); any other
    start folds into the running block behind a pause so the bookkeeping never
    shows up in the measurements (4 actions). Stops mirror that split.
    """
    region_table: dict[str, RegionInfo] = {}
    ir: list[IrDirective] = []
    active: dict[str, ExpandedDirective] = {}
    used_bindings: dict[str, int] = {}
    block_iter = iter(blocks)
    block: Block | None = None

    def region_bindings(name: str) -> tuple[str, str]:
        base = sanitize(name)
        used_bindings[base] = used_bindings.get(base, 0) + 1
        if used_bindings[base] > 1:  # hyphen/underscore twins collide after sanitizing
            base = f"{base}_{used_bindings[base]}"
        return f"__edpm_rv_{base}", f"__edpm_tid_{base}"

    bindings: dict[str, tuple[str, str]] = {}

    for d in expanded:
        if d.kind == "init":
            ir.append(IrDirective(LIB_INIT, None, d.line))
        elif d.kind == "deinit":
            ir.append(IrDirective(LIB_DEINIT, None, d.line))
        elif d.kind == "start":
            if not active:
                block = next(block_iter)
                ir.append(IrDirective(BLOCK_CREATE, block.ordinal, d.line))
                ir.append(IrDirective(BLOCK_START, block.ordinal, d.line))
                ir.append(IrDirective(REGION_COPY_START, d.region_name, d.line))
            else:
                ir.append(IrDirective(BLOCK_ACCUMULATE, block.ordinal, d.line))
                ir.append(IrDirective(BLOCK_PAUSE, block.ordinal, d.line))
                ir.append(IrDirective(REGION_COPY_START, d.region_name, d.line))
                ir.append(IrDirective(BLOCK_RESUME, block.ordinal, d.line))
            active[d.region_name] = d
            bindings[d.region_name] = region_bindings(d.region_name)
        elif d.kind == "stop":
            start = active.pop(d.region_name)
            if active:
                ir.append(IrDirective(BLOCK_ACCUMULATE, block.ordinal, d.line))
                ir.append(IrDirective(BLOCK_PAUSE, block.ordinal, d.line))
                ir.append(IrDirective(REGION_COMPUTE_EMIT, d.region_name, d.line))
                ir.append(IrDirective(REGION_BUMP_TEMPORAL, d.region_name, d.line))
                ir.append(IrDirective(BLOCK_RESUME, block.ordinal, d.line))
            else:
                ir.append(IrDirective(BLOCK_STOP_DESTROY, block.ordinal, d.line))
                ir.append(IrDirective(REGION_COMPUTE_EMIT, d.region_name, d.line))
                ir.append(IrDirective(REGION_BUMP_TEMPORAL, d.region_name, d.line))
            position = {c: i for i, c in enumerate(block.counters)}
            values_binding, temporal_binding = bindings[d.region_name]
            region_table[d.region_name] = RegionInfo(
                name=d.region_name,
                start_line=start.line,
                stop_line=d.line,
                counters=start.counters,
                block_index=BlockIndex(
                    block.ordinal,
                    tuple(position[c] for c in start.counters),
                ),
                values_binding=values_binding,
                temporal_binding=temporal_binding,
            )
    return region_table, ir


def analyze(directives: list[Directive]) -> AnalysisResult:
    """Run every pass in order; any validation error aborts before lowering."""
    result = AnalysisResult()
    result.diagnostics = validate(directives)
    if result.diagnostics:
        return result
    expanded, diags = normalize(directives)
    if diags:
        result.diagnostics = diags
        return result
    result.blocks = collect_blocks(expanded)
    result.region_table, result.ir = collect_regions(expanded, result.blocks)
    return result


def dump(result: AnalysisResult) -> str:
    """Plain-text dump of an analysis, used for golden tests and --dump-analysis."""
    lines = ["== blocks =="]
    for b in result.blocks:
        counters = ", ".join(c.dotted for c in b.counters)
        lines.append(
            f"block {b.ordinal}: lines {b.start_line}..{b.stop_line}, "
            f"counters [{counters}], eventset {b.eventset_binding}, "
            f"values {b.values_binding}"
        )
    lines.append("== regions ==")
    for info in sorted(result.region_table.values(), key=lambda r: (r.start_line, r.name)):
        counters = ", ".join(c.dotted for c in info.counters)
        indices = ", ".join(str(i) for i in info.block_index.indices)
        lines.append(
            f"region {info.name}: lines {info.start_line}..{info.stop_line}, "
            f"block {info.block_index.block_ordinal}, indices [{indices}], "
            f"counters [{counters}], values {info.values_binding}, "
            f"temporal {info.temporal_binding}"
        )
    lines.append("== ir ==")
    for entry in result.ir:
        target = "" if entry.target is None else f" {entry.target}"
        lines.append(f"line {entry.line}: {entry.action}{target}")
    return "\n".join(lines) + "\n"
