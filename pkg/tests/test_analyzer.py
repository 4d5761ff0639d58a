import random

from edpm import analyzer, catalog
from edpm.analyzer import analyze, collect_blocks, collect_regions, normalize, validate
from edpm.catalog import CounterId
from edpm.diagnostics import (
    DIRECTIVE_OUTSIDE_INIT_SPAN,
    DUPLICATE_COUNTER_SPEC,
    DUPLICATE_DEINIT,
    DUPLICATE_INIT,
    DUPLICATE_REGION_NAME,
    MISSING_DEINIT,
    MISSING_INIT,
    UNCLOSED_REGION,
    UNKNOWN_COUNTER,
    UNKNOWN_TYPE,
    UNMATCHED_STOP,
)
from edpm.reader import Clause, Directive, scan

from oracle import coverage_blocks, expected_indices, random_valid_directives


def _directives(*specs):
    """specs: (kind, name, clauses, line) tuples with trailing defaults."""
    out = []
    for spec in specs:
        kind, name, clauses, line = (*spec, None, (), 0)[:4] if len(spec) < 4 else spec
        out.append(Directive(kind, name, tuple(clauses), line))
    return out


def _wrap(*inner, first=1, last=99):
    return [
        Directive("init", None, (), first),
        *inner,
        Directive("deinit", None, (), last),
    ]


def start(name, clauses, line):
    return Directive("start", name, tuple(clauses), line)


def stop(name, line):
    return Directive("stop", name, (), line)


CPU = (Clause("cpu", ("cycles",)),)


def test_validate_accepts_matmul(corpus_dir):
    directives = scan((corpus_dir / "matmul.c").read_text()).directives
    assert validate(directives) == []


def test_duplicate_init_points_at_the_second_line():
    directives = _wrap(Directive("init", None, (), 5), start("r1", CPU, 10), stop("r1", 12))
    diags = validate(directives)
    assert [(d.reason, d.line) for d in diags] == [(DUPLICATE_INIT, 5)]
    assert "line 1" in diags[0].message


def test_missing_init_and_deinit():
    assert [d.reason for d in validate([])] == [MISSING_INIT, MISSING_DEINIT]
    only_init = [Directive("init", None, (), 1)]
    assert [d.reason for d in validate(only_init)] == [MISSING_DEINIT]


def test_duplicate_deinit():
    directives = _wrap(Directive("deinit", None, (), 50))
    diags = validate(directives)
    assert [(d.reason, d.line) for d in diags] == [(DUPLICATE_DEINIT, 99)]
    assert "line 50" in diags[0].message


def test_duplicate_region_name():
    directives = _wrap(
        start("r1", CPU, 10),
        stop("r1", 12),
        start("r1", CPU, 14),
        stop("r1", 16),
    )
    diags = validate(directives)
    assert (DUPLICATE_REGION_NAME, 14) in [(d.reason, d.line) for d in diags]


def test_duplicate_counter_spec_repeated_type():
    directives = _wrap(
        start("r1", (Clause("cpu", ("cycles",)), Clause("cpu", ("cycles",))), 10),
        stop("r1", 12),
    )
    diags = validate(directives)
    assert [(d.reason, d.line) for d in diags] == [(DUPLICATE_COUNTER_SPEC, 10)]


def test_duplicate_counter_spec_repeated_counter():
    directives = _wrap(
        start("r1", (Clause("branch", ("taken", "taken")),), 10),
        stop("r1", 12),
    )
    assert [(d.reason, d.line) for d in validate(directives)] == [
        (DUPLICATE_COUNTER_SPEC, 10)
    ]


def test_unmatched_stop_and_unclosed_region():
    directives = _wrap(stop("ghost", 10))
    assert [(d.reason, d.line) for d in validate(directives)] == [(UNMATCHED_STOP, 10)]

    directives = _wrap(start("r1", CPU, 10))
    assert [(d.reason, d.line) for d in validate(directives)] == [(UNCLOSED_REGION, 10)]


def test_second_stop_is_unmatched():
    directives = _wrap(start("r1", CPU, 10), stop("r1", 12), stop("r1", 14))
    assert [(d.reason, d.line) for d in validate(directives)] == [(UNMATCHED_STOP, 14)]


def test_directive_outside_init_span():
    directives = [
        start("early", CPU, 2),
        Directive("init", None, (), 4),
        stop("early", 6),
        Directive("deinit", None, (), 8),
    ]
    diags = validate(directives)
    assert (DIRECTIVE_OUTSIDE_INIT_SPAN, 2) in [(d.reason, d.line) for d in diags]


def test_deinit_before_init_is_outside_span():
    directives = [
        Directive("deinit", None, (), 2),
        Directive("init", None, (), 4),
    ]
    assert [(d.reason, d.line) for d in validate(directives)] == [
        (DIRECTIVE_OUTSIDE_INIT_SPAN, 2)
    ]


def test_normalize_expands_empty_memory_clause():
    directives = _wrap(start("r1", (Clause("memory", ()),), 10), stop("r1", 12))
    expanded, diags = normalize(directives)
    assert diags == []
    assert expanded[1].counters == (
        CounterId("memory", "loads"),
        CounterId("memory", "stores"),
    )


def test_normalize_clauseless_start_gets_the_full_catalog():
    directives = _wrap(start("r1", (), 10), stop("r1", 12))
    expanded, _ = normalize(directives)
    assert expanded[1].counters == catalog.expand_all()
    assert len(expanded[1].counters) == catalog.CATALOG_SIZE


def test_normalize_leaves_init_untouched():
    directives = _wrap(start("r1", CPU, 10), stop("r1", 12))
    expanded, _ = normalize(directives)
    assert expanded[0].kind == "init"
    assert expanded[0].counters == ()


def test_normalize_reports_unknown_tokens_with_lines():
    directives = _wrap(
        start("r1", (Clause("gpu", ()),), 10),
        stop("r1", 12),
        start("r2", (Clause("cache", ("l9-data",)),), 14),
        stop("r2", 16),
    )
    _, diags = normalize(directives)
    assert [(d.reason, d.line) for d in diags] == [
        (UNKNOWN_TYPE, 10),
        (UNKNOWN_COUNTER, 14),
    ]


def _expand(directives):
    expanded, diags = normalize(directives)
    assert diags == []
    return expanded


def test_collect_blocks_nested_pair_fuses():
    cycles = CounterId("cpu", "cycles")
    loads = CounterId("memory", "loads")
    directives = _wrap(
        start("a", (Clause("cpu", ("cycles",)),), 10),
        start("b", (Clause("memory", ("loads",)),), 12),
        stop("b", 14),
        stop("a", 16),
    )
    blocks = collect_blocks(_expand(directives))
    assert len(blocks) == 1
    assert (blocks[0].start_line, blocks[0].stop_line) == (10, 16)
    assert blocks[0].counters == (cycles, loads)


def test_collect_blocks_disjoint_regions_split():
    directives = _wrap(
        start("a", CPU, 5),
        stop("a", 9),
        start("b", CPU, 20),
        stop("b", 25),
    )
    blocks = collect_blocks(_expand(directives))
    assert [(b.start_line, b.stop_line) for b in blocks] == [(5, 9), (20, 25)]
    assert [b.ordinal for b in blocks] == [0, 1]


def test_collect_blocks_overlap_fuses():
    directives = _wrap(
        start("a", (Clause("cpu", ("cycles",)),), 5),
        start("b", (Clause("memory", ("loads",)),), 7),
        stop("a", 9),
        stop("b", 11),
    )
    blocks = collect_blocks(_expand(directives))
    assert len(blocks) == 1
    assert (blocks[0].start_line, blocks[0].stop_line) == (5, 11)
    assert set(blocks[0].counters) == {
        CounterId("cpu", "cycles"),
        CounterId("memory", "loads"),
    }


def test_shared_counters_share_one_slot():
    directives = _wrap(
        start("a", CPU, 5),
        start("b", CPU, 7),
        stop("b", 9),
        stop("a", 11),
    )
    blocks = collect_blocks(_expand(directives))
    assert blocks[0].counters == (CounterId("cpu", "cycles"),)


def test_collect_regions_indices_against_block_order():
    directives = _wrap(
        start("a", (Clause("cpu", ("cycles",)), Clause("memory", ("loads",))), 5),
        start("b", (Clause("memory", ("loads",)),), 7),
        stop("b", 9),
        stop("a", 11),
    )
    expanded = _expand(directives)
    blocks = collect_blocks(expanded)
    table, _ = collect_regions(expanded, blocks)
    assert table["b"].block_index.indices == (1,)
    assert table["a"].block_index.indices == (0, 1)


def test_region_wanting_the_whole_union_gets_identity_indices():
    directives = _wrap(start("a", (Clause("branch", ()),), 5), stop("a", 9))
    expanded = _expand(directives)
    blocks = collect_blocks(expanded)
    table, _ = collect_regions(expanded, blocks)
    assert table["a"].block_index.indices == tuple(range(6))


def test_lowering_nested_start_action_counts():
    directives = _wrap(
        start("outer", CPU, 5),
        start("inner", CPU, 7),
        stop("inner", 9),
        stop("outer", 11),
    )
    expanded = _expand(directives)
    blocks = collect_blocks(expanded)
    _, ir = collect_regions(expanded, blocks)
    outer_start = [e.action for e in ir if e.line == 5]
    inner_start = [e.action for e in ir if e.line == 7]
    assert outer_start == [
        analyzer.BLOCK_CREATE,
        analyzer.BLOCK_START,
        analyzer.REGION_COPY_START,
    ]
    assert inner_start == [
        analyzer.BLOCK_ACCUMULATE,
        analyzer.BLOCK_PAUSE,
        analyzer.REGION_COPY_START,
        analyzer.BLOCK_RESUME,
    ]
    inner_stop = [e.action for e in ir if e.line == 9]
    outer_stop = [e.action for e in ir if e.line == 11]
    assert inner_stop == [
        analyzer.BLOCK_ACCUMULATE,
        analyzer.BLOCK_PAUSE,
        analyzer.REGION_COMPUTE_EMIT,
        analyzer.REGION_BUMP_TEMPORAL,
        analyzer.BLOCK_RESUME,
    ]
    assert outer_stop == [
        analyzer.BLOCK_STOP_DESTROY,
        analyzer.REGION_COMPUTE_EMIT,
        analyzer.REGION_BUMP_TEMPORAL,
    ]


def test_analyze_matmul_structure(corpus_dir):
    directives = scan((corpus_dir / "matmul.c").read_text()).directives
    result = analyze(directives)
    assert result.ok
    assert len(result.blocks) == 1
    assert set(result.region_table) == {"for-iterated", "multiply-iterated"}
    union = set()
    for info in result.region_table.values():
        union.update(info.counters)
    assert set(result.blocks[0].counters) == union


def test_analyze_init_deinit_only():
    result = analyze(_wrap())
    assert result.ok
    assert result.blocks == []
    assert result.region_table == {}
    assert [e.action for e in result.ir] == [analyzer.LIB_INIT, analyzer.LIB_DEINIT]


def test_analyze_returns_no_partial_ir_on_errors():
    result = analyze(_wrap(stop("ghost", 10)))
    assert not result.ok
    assert result.ir == [] and result.blocks == [] and result.region_table == {}


def test_analyze_e4_overlaps_fuse_per_function(corpus_dir):
    directives = scan((corpus_dir / "e4_static.c").read_text()).directives
    result = analyze(directives)
    assert result.ok
    assert len(result.blocks) == 1  # the overlap chain never lets the block close
    assert len(result.region_table) == 3


def test_ir_positions_cover_every_directive():
    rng = random.Random(7)
    for _ in range(50):
        directives, _ = random_valid_directives(rng)
        result = analyze(directives)
        assert result.ok
        directive_lines = {d.line for d in directives}
        ir_lines = {e.line for e in result.ir}
        assert ir_lines == directive_lines
        positions = [e.line for e in result.ir]
        assert positions == sorted(positions)


def test_analyze_is_deterministic():
    rng = random.Random(11)
    directives, _ = random_valid_directives(rng)
    first = analyze(directives)
    second = analyze(directives)
    assert first.blocks == second.blocks
    assert first.region_table == second.region_table
    assert first.ir == second.ir


def test_storage_is_minimal():
    rng = random.Random(13)
    for _ in range(25):
        directives, intervals = random_valid_directives(rng)
        result = analyze(directives)
        for _, _, counters in intervals:
            pass
        for info in result.region_table.values():
            assert len(info.block_index.indices) == len(info.counters)
        for block in result.blocks:
            assert len(set(block.counters)) == len(block.counters)


def test_blocks_match_coverage_oracle_small_batch():
    rng = random.Random(17)
    for _ in range(100):
        directives, intervals = random_valid_directives(rng)
        result = analyze(directives)
        expected = coverage_blocks(intervals)
        got = [
            (b.start_line, b.stop_line, frozenset(b.counters)) for b in result.blocks
        ]
        assert got == expected
        for start_line, stop_line, counters in intervals:
            name = next(
                n for n, info in result.region_table.items()
                if info.start_line == start_line
            )
            info = result.region_table[name]
            block = result.blocks[info.block_index.block_ordinal]
            assert block.start_line <= start_line <= stop_line <= block.stop_line
            assert info.block_index.indices == expected_indices(
                info.counters, frozenset(block.counters)
            )


def test_sanitized_binding_collisions_are_disambiguated():
    directives = _wrap(
        start("a-b", CPU, 5),
        stop("a-b", 7),
        start("a_b", CPU, 10),
        stop("a_b", 12),
    )
    result = analyze(directives)
    bindings = {info.values_binding for info in result.region_table.values()}
    assert len(bindings) == 2


def test_dump_lists_blocks_regions_and_ir(corpus_dir):
    directives = scan((corpus_dir / "matmul.c").read_text()).directives
    text = analyzer.dump(analyze(directives))
    assert "== blocks ==" in text and "== ir ==" in text
    assert "block 0:" in text
    assert "region for-iterated:" in text
    assert "lib-init" in text and "block-stop-destroy 0" in text
