"""Code generation: lower analysis results into an instrumented source file, a
support header, and a build manifest for the chosen backend.

Every pragma line is replaced by a brace-wrapped fragment; all other lines are
copied byte for byte. Fragments are multi-line, so each one ends with a
``#line`` directive that restores the original numbering for the code that
follows. File-scope bindings live in the generated header, which the build
recipe force-includes ahead of the instrumented source so that fragments in
any function can reach them without disturbing the first source line.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import PurePath

from . import analyzer, catalog
from .analyzer import AnalysisResult, IrDirective
from .diagnostics import CodegenError, POSITION_COLLISION
from .reader import is_directive_line

ROLE_HEADER = "header"
ROLE_SOURCE = "source"
ROLE_BUILD = "build-artifact"

HEADER_NAME = "edpm_gen.h"
MANIFEST_NAME = "edpm_build.txt"


@dataclass(frozen=True)
class GenConfig:
    backend: str = "soft"
    json_output_path: str = "edpm.json"
    keep_region_records_buffered: bool = False

    def __post_init__(self):
        if self.backend not in catalog.BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}")


@dataclass(frozen=True)
class CodeFragment:
    line: int
    text: str


@dataclass(frozen=True)
class FileSpec:
    role: str
    path: str
    content: str


def _c_string(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _names_binding(values_binding: str) -> str:
    # __edpm_rv_<name> -> __edpm_rn_<name>; keeps region arrays paired.
    return "__edpm_rn_" + values_binding[len("__edpm_rv_") :]


def _block(analysis: AnalysisResult, ordinal: int) -> analyzer.Block:
    return analysis.blocks[ordinal]


def _region(analysis: AnalysisResult, name: str) -> analyzer.RegionInfo:
    return analysis.region_table[name]


def lower(ir: IrDirective, analysis: AnalysisResult, config: GenConfig) -> CodeFragment:
    """Lower one instrumentation action to backend-specific statements."""
    soft = config.backend == "soft"
    stmts: list[str] = []

    if ir.action == analyzer.LIB_INIT:
        if soft:
            stmts.append(f"edpm_shim_init({_c_string(config.json_output_path)});")
            if config.keep_region_records_buffered:
                stmts.append("edpm_shim_set_buffered(1);")
        else:
            stmts.append(f"__edpm_open_output({_c_string(config.json_output_path)});")
            stmts.append(
                "if (PAPI_library_init(PAPI_VER_CURRENT) != PAPI_VER_CURRENT) "
                '__edpm_fail("PAPI_library_init");'
            )
            for b in analysis.blocks:
                stmts.append(
                    f"if (PAPI_create_eventset(&{b.eventset_binding}) != PAPI_OK) "
                    '__edpm_fail("PAPI_create_eventset");'
                )
                for counter in b.counters:
                    event = catalog.backend_event("papi", counter)
                    stmts.append(
                        f"if (PAPI_add_named_event({b.eventset_binding}, "
                        f'"{event}") != PAPI_OK) '
                        f'__edpm_fail("PAPI_add_named_event {event}");'
                    )
    elif ir.action == analyzer.LIB_DEINIT:
        if soft:
            stmts.append("edpm_shim_finalize();")
        else:
            for b in analysis.blocks:
                stmts.append(f"PAPI_cleanup_eventset({b.eventset_binding});")
                stmts.append(f"PAPI_destroy_eventset(&{b.eventset_binding});")
            stmts.append("PAPI_shutdown();")
            stmts.append("__edpm_close_output();")
    elif ir.action == analyzer.BLOCK_CREATE:
        b = _block(analysis, ir.target)
        n = len(b.counters)
        stmts.append(f"__edpm_zero({b.values_binding}, {n});")
        if soft:
            stmts.append(
                f"{b.eventset_binding} = "
                f"edpm_soft_block_create(__edpm_bn_{b.ordinal}, {n});"
            )
    elif ir.action == analyzer.BLOCK_START:
        b = _block(analysis, ir.target)
        if soft:
            stmts.append("edpm_soft_block_start();")
        else:
            stmts.append(
                f"if (PAPI_start({b.eventset_binding}) != PAPI_OK) "
                '__edpm_fail("PAPI_start");'
            )
    elif ir.action == analyzer.BLOCK_ACCUMULATE:
        b = _block(analysis, ir.target)
        if soft:
            stmts.append(f"edpm_soft_read({b.values_binding});")
        else:
            stmts.append(
                f"if (PAPI_accum({b.eventset_binding}, {b.values_binding}) != PAPI_OK) "
                '__edpm_fail("PAPI_accum");'
            )
    elif ir.action == analyzer.BLOCK_PAUSE:
        b = _block(analysis, ir.target)
        if soft:
            stmts.append("edpm_soft_pause();")
        else:
            stmts.append(
                f"if (PAPI_stop({b.eventset_binding}, __edpm_ps_{b.ordinal}) != PAPI_OK) "
                '__edpm_fail("PAPI_stop");'
            )
    elif ir.action == analyzer.BLOCK_RESUME:
        b = _block(analysis, ir.target)
        if soft:
            stmts.append("edpm_soft_resume();")
        else:
            stmts.append(
                f"if (PAPI_start({b.eventset_binding}) != PAPI_OK) "
                '__edpm_fail("PAPI_start");'
            )
    elif ir.action == analyzer.BLOCK_STOP_DESTROY:
        b = _block(analysis, ir.target)
        if soft:
            stmts.append(f"edpm_soft_read({b.values_binding});")
            stmts.append("edpm_soft_block_destroy();")
        else:
            # The eventset itself is destroyed at deinit; a block may re-run.
            stmts.append(
                f"if (PAPI_accum({b.eventset_binding}, {b.values_binding}) != PAPI_OK) "
                '__edpm_fail("PAPI_accum");'
            )
            stmts.append(
                f"if (PAPI_stop({b.eventset_binding}, __edpm_ps_{b.ordinal}) != PAPI_OK) "
                '__edpm_fail("PAPI_stop");'
            )
    elif ir.action == analyzer.REGION_COPY_START:
        r = _region(analysis, ir.target)
        b = _block(analysis, r.block_index.block_ordinal)
        for k, idx in enumerate(r.block_index.indices):
            stmts.append(f"{r.values_binding}[{k}] = {b.values_binding}[{idx}];")
    elif ir.action == analyzer.REGION_COMPUTE_EMIT:
        r = _region(analysis, ir.target)
        b = _block(analysis, r.block_index.block_ordinal)
        for k, idx in enumerate(r.block_index.indices):
            stmts.append(
                f"{r.values_binding}[{k}] = "
                f"{b.values_binding}[{idx}] - {r.values_binding}[{k}];"
            )
        emitter = "edpm_emit_record" if soft else "__edpm_emit"
        stmts.append(
            f"{emitter}({_c_string(r.name)}, {r.temporal_binding}, "
            f"{_names_binding(r.values_binding)}, "
            f"{r.values_binding}, {len(r.counters)});"
        )
    elif ir.action == analyzer.REGION_BUMP_TEMPORAL:
        r = _region(analysis, ir.target)
        stmts.append(f"{r.temporal_binding} += 1;")
    else:
        raise ValueError(f"unknown instrumentation action {ir.action!r}")

    return CodeFragment(ir.line, "\n".join(stmts))


def _fragment_label(pieces: list[IrDirective]) -> str:
    for ir in pieces:
        if ir.action == analyzer.LIB_INIT:
            return "init"
        if ir.action == analyzer.LIB_DEINIT:
            return "deinit"
        if ir.action == analyzer.REGION_COPY_START:
            return f"start {ir.target}"
    for ir in pieces:
        if ir.action == analyzer.REGION_COMPUTE_EMIT:
            return f"stop {ir.target}"
    return "directive"


def merge_fragments(
    analysis: AnalysisResult, config: GenConfig, original_source: str
) -> list[CodeFragment]:
    """One brace-wrapped fragment per pragma line, indented like the pragma."""
    lines = original_source.splitlines()
    by_line: dict[int, list[IrDirective]] = {}
    for ir in analysis.ir:
        by_line.setdefault(ir.line, []).append(ir)

    fragments = []
    for line, pieces in sorted(by_line.items()):
        original = lines[line - 1] if line - 1 < len(lines) else ""
        indent = original[: len(original) - len(original.lstrip())]
        stmts: list[str] = []
        for ir in pieces:
            lowered = lower(ir, analysis, config)
            stmts.extend(s for s in lowered.text.splitlines() if s)
        body = "\n".join(f"{indent}    {s}" for s in stmts)
        label = _fragment_label(pieces)
        text = f"{indent}{{ /* edpm: {label} */\n{body}\n{indent}}}\n#line {line + 1}"
        fragments.append(CodeFragment(line, text))
    return fragments


def render(original_source: str, fragments: list[CodeFragment]) -> str:
    """Splice fragments over their pragma lines; everything else is untouched."""
    by_line: dict[int, CodeFragment] = {}
    for frag in fragments:
        if frag.line in by_line:
            raise CodegenError(
                POSITION_COLLISION, f"two fragments claim line {frag.line}"
            )
        by_line[frag.line] = frag

    out = []
    for number, line in enumerate(original_source.splitlines(), start=1):
        frag = by_line.pop(number, None)
        if frag is None:
            out.append(line)
        else:
            if not is_directive_line(line):
                raise ValueError(f"fragment targets non-pragma line {number}")
            out.append(frag.text)
    if by_line:
        raise ValueError(f"fragment lines beyond end of file: {sorted(by_line)}")
    text = "\n".join(out)
    if original_source.endswith("\n"):
        text += "\n"
    return text


_SHIM_DECLS = """\
/* Runtime shim interface; the shim library is linked into the executable. */
extern void edpm_shim_init(const char *path);
extern void edpm_shim_set_buffered(int on);
extern void edpm_shim_finalize(void);
extern int  edpm_soft_block_create(const char *const *names, int count);
extern void edpm_soft_block_start(void);
extern void edpm_soft_pause(void);
extern void edpm_soft_resume(void);
extern void edpm_soft_read(long long *values_out);
extern void edpm_soft_block_destroy(void);
extern void edpm_emit_record(const char *name, long long temporal_id,
                             const char *const *counter_names,
                             const long long *values, int count);
"""

_ZERO_HELPER = """\
static void __edpm_zero(long long *values, int count)
{
    int i;
    for (i = 0; i < count; i++)
        values[i] = 0;
}
"""

_PAPI_STREAM_HELPERS = """\
static FILE *__edpm_out = NULL;
static int __edpm_first = 1;

static void __edpm_fail(const char *what)
{
    fprintf(stderr, "edpm: %s failed\\n", what);
    exit(1);
}

static void __edpm_open_output(const char *path)
{
    const char *env = getenv("EDPM_OUTPUT");
    if (env && env[0])
        path = env;
    __edpm_out = fopen(path, "w");
    if (!__edpm_out) {
        fprintf(stderr, "edpm: cannot open output file '%s'\\n", path);
        exit(1);
    }
    fputc('[', __edpm_out);
}

static void __edpm_emit(const char *name, long long temporal_id,
                        const char *const *counter_names,
                        const long long *values, int count)
{
    int i;
    fputs(__edpm_first ? "\\n" : ",\\n", __edpm_out);
    __edpm_first = 0;
    fprintf(__edpm_out, "{\\"name\\":\\"%s\\",\\"temporal-id\\":%lld,\\"counters\\":{",
            name, temporal_id);
    for (i = 0; i < count; i++)
        fprintf(__edpm_out, "%s\\"%s\\":%lld",
                i ? "," : "", counter_names[i], values[i]);
    fputs("}}", __edpm_out);
}

static void __edpm_close_output(void)
{
    if (!__edpm_out)
        return;
    fputs(__edpm_first ? "]\\n" : "\\n]\\n", __edpm_out);
    fclose(__edpm_out);
    __edpm_out = NULL;
}
"""

_PAPI_BUFFER_HELPERS = """\
static FILE *__edpm_out = NULL;
static char **__edpm_records = NULL;
static int __edpm_nrecords = 0;
static int __edpm_capacity = 0;

static void __edpm_fail(const char *what)
{
    fprintf(stderr, "edpm: %s failed\\n", what);
    exit(1);
}

static void __edpm_open_output(const char *path)
{
    const char *env = getenv("EDPM_OUTPUT");
    if (env && env[0])
        path = env;
    __edpm_out = fopen(path, "w");
    if (!__edpm_out) {
        fprintf(stderr, "edpm: cannot open output file '%s'\\n", path);
        exit(1);
    }
    fputc('[', __edpm_out);
}

static void __edpm_emit(const char *name, long long temporal_id,
                        const char *const *counter_names,
                        const long long *values, int count)
{
    char buf[4096];
    int off = 0;
    int i;
    off += snprintf(buf + off, sizeof buf - off,
                    "{\\"name\\":\\"%s\\",\\"temporal-id\\":%lld,\\"counters\\":{",
                    name, temporal_id);
    for (i = 0; i < count; i++)
        off += snprintf(buf + off, sizeof buf - off, "%s\\"%s\\":%lld",
                        i ? "," : "", counter_names[i], values[i]);
    snprintf(buf + off, sizeof buf - off, "}}");
    if (__edpm_nrecords == __edpm_capacity) {
        __edpm_capacity = __edpm_capacity ? __edpm_capacity * 2 : 16;
        __edpm_records = realloc(__edpm_records,
                                 __edpm_capacity * sizeof *__edpm_records);
        if (!__edpm_records)
            __edpm_fail("realloc");
    }
    __edpm_records[__edpm_nrecords] = malloc(strlen(buf) + 1);
    if (!__edpm_records[__edpm_nrecords])
        __edpm_fail("malloc");
    strcpy(__edpm_records[__edpm_nrecords], buf);
    __edpm_nrecords++;
}

static void __edpm_close_output(void)
{
    int i;
    if (!__edpm_out)
        return;
    for (i = 0; i < __edpm_nrecords; i++)
        fprintf(__edpm_out, "%s%s", i ? ",\\n" : "\\n", __edpm_records[i]);
    fputs(__edpm_nrecords ? "\\n]\\n" : "]\\n", __edpm_out);
    fclose(__edpm_out);
    __edpm_out = NULL;
}
"""


def render_header(analysis: AnalysisResult, config: GenConfig) -> str:
    soft = config.backend == "soft"
    parts = [
        f"/* Instrumentation support generated by edpm ({config.backend} backend). */",
        "/* Do not edit: regenerated on every precompile. */",
        "#ifndef EDPM_GEN_H",
        "#define EDPM_GEN_H",
        "",
    ]
    if soft:
        parts.append(_SHIM_DECLS)
    else:
        parts.append("#include <papi.h>")
        parts.append("#include <stdio.h>")
        parts.append("#include <stdlib.h>")
        if config.keep_region_records_buffered:
            parts.append("#include <string.h>")
        parts.append("")
        parts.append(
            _PAPI_BUFFER_HELPERS
            if config.keep_region_records_buffered
            else _PAPI_STREAM_HELPERS
        )
    if analysis.blocks:
        parts.append(_ZERO_HELPER)

    for b in analysis.blocks:
        n = len(b.counters)
        names = ", ".join(_c_string(c.dotted) for c in b.counters)
        parts.append(f"/* block {b.ordinal}: lines {b.start_line}..{b.stop_line} */")
        init = " = -1" if soft else " = PAPI_NULL"
        parts.append(f"static int {b.eventset_binding}{init};")
        parts.append(f"static long long {b.values_binding}[{n}];")
        if soft:
            parts.append(f"static const char *const __edpm_bn_{b.ordinal}[{n}] = {{ {names} }};")
        else:
            parts.append(f"static long long __edpm_ps_{b.ordinal}[{n}];")
        parts.append("")

    regions = sorted(analysis.region_table.values(), key=lambda r: (r.start_line, r.name))
    for r in regions:
        n = len(r.counters)
        names = ", ".join(_c_string(c.dotted) for c in r.counters)
        parts.append(
            f"/* region {r.name}: block {r.block_index.block_ordinal}, "
            f"lines {r.start_line}..{r.stop_line} */"
        )
        parts.append(f"static long long {r.values_binding}[{n}];")
        parts.append(f"static long long {r.temporal_binding} = 0;")
        parts.append(f"static const char *const {_names_binding(r.values_binding)}[{n}] = {{ {names} }};")
        parts.append("")

    parts.append("#endif /* EDPM_GEN_H */")
    return "\n".join(parts) + "\n"


def render_manifest(config: GenConfig, stem: str) -> str:
    link = "edpmshim" if config.backend == "soft" else "papi"
    lines = [
        f"backend={config.backend}",
        f"sources={stem}.edpm.c",
        f"force_include={HEADER_NAME}",
        "include_dirs=.",
        f"link_libs={link}",
        f"output={stem}.edpm",
        f"json={config.json_output_path}",
    ]
    return "\n".join(lines) + "\n"


def generate(
    analysis: AnalysisResult,
    original_source: str,
    config: GenConfig,
    source_name: str = "input.c",
) -> list[FileSpec]:
    """Produce the three output files: support header, instrumented source, build manifest."""
    if analysis.diagnostics:
        raise ValueError("generate called with unresolved diagnostics")
    fragments = merge_fragments(analysis, config, original_source)
    instrumented = render(original_source, fragments)
    stem = PurePath(source_name).stem
    return [
        FileSpec(ROLE_HEADER, HEADER_NAME, render_header(analysis, config)),
        FileSpec(ROLE_SOURCE, f"{stem}.edpm.c", instrumented),
        FileSpec(ROLE_BUILD, MANIFEST_NAME, render_manifest(config, stem)),
    ]
