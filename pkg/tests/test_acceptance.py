"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s`.
"""

import json
import random
import subprocess
import sys
import time
from pathlib import Path

from edpm import analyzer, catalog, runner
from edpm.analyzer import analyze
from edpm.catalog import CounterId
from edpm.reader import is_directive_line, scan
from edpm.runner import RunConfig

from oracle import coverage_blocks, expected_indices, random_valid_directives

EDPM = [sys.executable, "-m", "edpm.cli"]


def run_cli(*args, **kwargs):
    return subprocess.run(EDPM + list(args), capture_output=True, text=True, **kwargs)


# -- criterion 1: block/region oracle suite -----------------------------------

def test_block_region_oracle_suite():
    rng = random.Random(0xED14)
    cases = 1000
    began = time.perf_counter()
    for _ in range(cases):
        directives, intervals = random_valid_directives(rng, max_regions=10)
        result = analyze(directives)
        assert result.ok

        expected = coverage_blocks(intervals)
        got = [(b.start_line, b.stop_line, frozenset(b.counters)) for b in result.blocks]
        assert got == expected

        by_start = {info.start_line: info for info in result.region_table.values()}
        for start_line, stop_line, counters in intervals:
            info = by_start[start_line]
            assert info.stop_line == stop_line
            assert info.counters == catalog.sort_counters(counters)
            block = result.blocks[info.block_index.block_ordinal]
            assert block.start_line <= start_line <= stop_line <= block.stop_line
            assert info.block_index.indices == expected_indices(
                info.counters, frozenset(block.counters)
            )
    elapsed = time.perf_counter() - began
    assert elapsed < 10.0, f"oracle suite took {elapsed:.1f}s"
    print(f"\nACCEPTANCE PASS: oracle suite, {cases} sequences in {elapsed:.2f}s")


# -- criterion 2: validation diagnostics --------------------------------------

VALIDATION_FIXTURES = {
    "DuplicateInit": (
        "int main(void) {\n#pragma edpm init\n#pragma edpm init\n"
        "#pragma edpm deinit\n}\n",
        3,
    ),
    "MissingInit": ("int main(void) {\n#pragma edpm deinit\n}\n", 0),
    "MissingDeinit": ("int main(void) {\n#pragma edpm init\n}\n", 0),
    "DuplicateDeinit": (
        "int main(void) {\n#pragma edpm init\n#pragma edpm deinit\n"
        "#pragma edpm deinit\n}\n",
        4,
    ),
    "DuplicateRegionName": (
        "int main(void) {\n#pragma edpm init\n"
        "#pragma edpm start r1 cpu()\n#pragma edpm stop r1\n"
        "#pragma edpm start r1 cpu()\n#pragma edpm stop r1\n"
        "#pragma edpm deinit\n}\n",
        5,
    ),
    "DuplicateCounterSpec": (
        "int main(void) {\n#pragma edpm init\n"
        "#pragma edpm start r1 cpu(cycles), cpu(cycles)\n#pragma edpm stop r1\n"
        "#pragma edpm deinit\n}\n",
        3,
    ),
    "UnmatchedStop": (
        "int main(void) {\n#pragma edpm init\n#pragma edpm stop ghost\n"
        "#pragma edpm deinit\n}\n",
        3,
    ),
    "UnclosedRegion": (
        "int main(void) {\n#pragma edpm init\n#pragma edpm start r1 cpu()\n"
        "#pragma edpm deinit\n}\n",
        3,
    ),
    "DirectiveOutsideInitSpan": (
        "int main(void) {\n#pragma edpm start r1 cpu()\n#pragma edpm init\n"
        "#pragma edpm stop r1\n#pragma edpm deinit\n}\n",
        2,
    ),
    "UnknownType": (
        "int main(void) {\n#pragma edpm init\n#pragma edpm start r1 gpu()\n"
        "#pragma edpm stop r1\n#pragma edpm deinit\n}\n",
        3,
    ),
    "UnknownCounter": (
        "int main(void) {\n#pragma edpm init\n"
        "#pragma edpm start r1 cache(l9-data)\n"
        "#pragma edpm stop r1\n#pragma edpm deinit\n}\n",
        3,
    ),
}


def test_validation_diagnostics():
    for reason, (source, line) in VALIDATION_FIXTURES.items():
        scanned = scan(source)
        assert scanned.ok, f"{reason} fixture must parse"
        result = analyze(scanned.directives)
        hits = [(d.reason, d.line) for d in result.diagnostics]
        assert (reason, line) in hits, f"{reason}: got {hits}"
    print(f"\nACCEPTANCE PASS: validation suite, {len(VALIDATION_FIXTURES)} classes")


# -- criterion 3: catalog fidelity --------------------------------------------

# The full counter taxonomy, enumerated by hand, row by row; the shipped
# data table must match this list exactly.
TABLE_ROWS = {
    "cpu": ["cycles", "instructions"],
    "memory": ["loads", "stores"],
    "floating-point": [
        "instructions", "operations", "multiply", "add", "divide", "sqrt", "inverse",
    ],
    "vector": ["single-precision", "double-precision"],
    "branch": [
        "unconditional", "conditional", "taken", "not-taken",
        "mispredicted", "correctly-predicted",
    ],
    "cache": [
        "invalidation", "l1-data", "l2-data", "l3-data",
        "l1-instructions", "l2-instructions", "l3-instructions",
        "l1-loads", "l2-loads", "l1-stores", "l2-stores",
    ],
}

# PAPI preset documentation oracle (papi_avail names and descriptions).
PAPI_PRESET_DOC = {
    "PAPI_TOT_CYC": "Total cycles",
    "PAPI_TOT_INS": "Instructions completed",
    "PAPI_LD_INS": "Load instructions",
    "PAPI_SR_INS": "Store instructions",
    "PAPI_FP_INS": "Floating point instructions",
    "PAPI_FP_OPS": "Floating point operations",
    "PAPI_FML_INS": "Floating point multiply instructions",
    "PAPI_FAD_INS": "Floating point add instructions",
    "PAPI_FDV_INS": "Floating point divide instructions",
    "PAPI_FSQ_INS": "Floating point square root instructions",
    "PAPI_FNV_INS": "Floating point inverse instructions",
    "PAPI_VEC_SP": "Single precision vector/SIMD instructions",
    "PAPI_VEC_DP": "Double precision vector/SIMD instructions",
    "PAPI_BR_UCN": "Unconditional branch instructions",
    "PAPI_BR_CN": "Conditional branch instructions",
    "PAPI_BR_TKN": "Conditional branch instructions taken",
    "PAPI_BR_NTK": "Conditional branch instructions not taken",
    "PAPI_BR_MSP": "Conditional branch instructions mispredicted",
    "PAPI_BR_PRC": "Conditional branch instructions correctly predicted",
    "PAPI_CA_INV": "Requests for cache line invalidation",
    "PAPI_L1_DCM": "Level 1 data cache misses",
    "PAPI_L2_DCM": "Level 2 data cache misses",
    "PAPI_L3_DCM": "Level 3 data cache misses",
    "PAPI_L1_ICM": "Level 1 instruction cache misses",
    "PAPI_L2_ICM": "Level 2 instruction cache misses",
    "PAPI_L3_ICM": "Level 3 instruction cache misses",
    "PAPI_L1_LDM": "Level 1 load misses",
    "PAPI_L2_LDM": "Level 2 load misses",
    "PAPI_L1_STM": "Level 1 store misses",
    "PAPI_L2_STM": "Level 2 store misses",
}


def test_catalog_fidelity():
    enumerated = [
        CounterId(t, name) for t, names in TABLE_ROWS.items() for name in names
    ]
    assert len(enumerated) == 30
    assert catalog.CATALOG_SIZE == len(enumerated)
    assert list(catalog.expand_all()) == enumerated  # catalog order = print order

    for counter in enumerated:
        event = catalog.backend_event("papi", counter)
        assert event in PAPI_PRESET_DOC, f"{counter.dotted} maps to unknown {event}"

    # The shipped mapping file must agree with the documentation oracle.
    for entry in catalog.entries():
        assert entry.papi_event in PAPI_PRESET_DOC
        assert entry.description == PAPI_PRESET_DOC[entry.papi_event], entry.id.dotted
    print(f"\nACCEPTANCE PASS: catalog fidelity, {catalog.CATALOG_SIZE} counters verified")


# -- criterion 4: codegen golden suite -----------------------------------------

GOLDEN_INPUTS = [f"{c}_{v}.c" for c in runner.CONFIGS for v in ("static", "dynamic")]


def _precompile_to(tmp_path: Path, source: Path, backend: str, tag: str) -> dict[str, bytes]:
    out = tmp_path / tag
    proc = run_cli("precompile", str(source), "--backend", backend, "-o", str(out))
    assert proc.returncode == 0, proc.stderr
    return {p.name: p.read_bytes() for p in sorted(out.iterdir())}


def test_codegen_golden_suite(tmp_path, corpus_dir):
    checked = 0
    for name in GOLDEN_INPUTS:
        source = corpus_dir / name
        original_lines = source.read_text().splitlines()
        for backend in ("soft", "papi"):
            first = _precompile_to(tmp_path, source, backend, f"{name}-{backend}-a")
            second = _precompile_to(tmp_path, source, backend, f"{name}-{backend}-b")
            assert first == second, f"{name} {backend} output differs across runs"

            instrumented = first[f"{name[:-2]}.edpm.c"].decode()
            kept = []
            in_fragment = False
            for line in instrumented.splitlines():
                if not in_fragment and "{ /* edpm:" in line:
                    in_fragment = True
                    continue
                if in_fragment:
                    if line.startswith("#line "):
                        in_fragment = False
                    continue
                kept.append(line)
            untouched = [l for l in original_lines if not is_directive_line(l)]
            assert kept == untouched, f"{name} {backend} touched non-pragma lines"
            checked += 1
    print(f"\nACCEPTANCE PASS: codegen golden suite, {checked} input/backend pairs")


# -- criterion 5: start lowering shapes ----------------------------------------

def test_start_lowering_action_counts():
    source = (
        "int main(void) {\n"
        "#pragma edpm init\n"
        "#pragma edpm start outer cpu(cycles)\n"
        "    a();\n"
        "#pragma edpm start inner memory(loads)\n"
        "    b();\n"
        "#pragma edpm stop inner\n"
        "#pragma edpm stop outer\n"
        "#pragma edpm deinit\n"
        "}\n"
    )
    result = analyze(scan(source).directives)
    assert result.ok
    dump = analyzer.dump(result)
    ir_lines = [l for l in dump.splitlines()[dump.splitlines().index("== ir ==") + 1 :]]

    outer_start = [l.split(": ", 1)[1] for l in ir_lines if l.startswith("line 3:")]
    inner_start = [l.split(": ", 1)[1] for l in ir_lines if l.startswith("line 5:")]
    assert outer_start == ["block-create 0", "block-start 0", "region-copy-start outer"]
    assert inner_start == [
        "block-accumulate 0",
        "block-pause 0",
        "region-copy-start inner",
        "block-resume 0",
    ]
    assert len(outer_start) == 3 and len(inner_start) == 4
    print("\nACCEPTANCE PASS: start lowering, 3 actions on empty stack / 4 when active")


# -- criterion 6: LOC report -----------------------------------------------------

def test_loc_report_static_vs_dynamic(capsys):
    rows = runner.corpus_loc_table()
    assert [row["config"] for row in rows] == list(runner.CONFIGS)
    static_total = 0
    dynamic_total = 0
    for row in rows:
        static, dynamic = row["static"], row["dynamic"]
        assert static.annotation_loc == dynamic.annotation_loc, row["config"]
        static_total += static.annotation_loc
        dynamic_total += dynamic.annotation_loc
        assert static.ratio_generated_annotation > 1.0
        assert row["papi_ll_ratio"] > 1.0
    assert static_total == dynamic_total

    ratios = [r["static"].ratio_generated_annotation for r in rows] + [
        r["dynamic"].ratio_generated_annotation for r in rows
    ]
    ll_ratios = [r["papi_ll_ratio"] for r in rows]
    print(
        "\nACCEPTANCE PASS: LOC report, annotation LOC identical across sets "
        f"({static_total} lines); generated/annotation "
        f"{min(ratios):.2f}-{max(ratios):.2f} "
        f"(reference {runner.REFERENCE_GENERATED_RATIO_STATIC}/"
        f"{runner.REFERENCE_GENERATED_RATIO_DYNAMIC}, informational); "
        f"PAPI-LL/annotation {min(ll_ratios):.2f}-{max(ll_ratios):.2f} "
        f"(reference {runner.REFERENCE_PAPI_LL_RATIO[0]}-"
        f"{runner.REFERENCE_PAPI_LL_RATIO[1]}, informational)"
    )


# -- criterion 7: pragma transparency -------------------------------------------

TRANSPARENCY_INPUTS = GOLDEN_INPUTS + ["matmul.c"]


def test_pragma_transparency(tmp_path, corpus_dir):
    for name in TRANSPARENCY_INPUTS:
        source = (corpus_dir / name).read_text()
        annotated_dir = tmp_path / f"{name}-annotated"
        stripped_dir = tmp_path / f"{name}-stripped"
        for directory in (annotated_dir, stripped_dir):
            directory.mkdir()
        (annotated_dir / "prog.c").write_text(source)
        stripped = "\n".join(
            line for line in source.splitlines() if not is_directive_line(line)
        )
        (stripped_dir / "prog.c").write_text(stripped + "\n")

        binaries = []
        outputs = []
        for directory in (annotated_dir, stripped_dir):
            compile_proc = subprocess.run(
                ["cc", "-o", "prog.bin", "prog.c"],
                cwd=directory, capture_output=True, text=True,
            )
            assert compile_proc.returncode == 0, f"{name}: {compile_proc.stderr}"
            run_proc = subprocess.run(
                ["./prog.bin"], cwd=directory, capture_output=True, text=True
            )
            assert run_proc.returncode == 0
            binaries.append((directory / "prog.bin").read_bytes())
            outputs.append(run_proc.stdout)
        assert binaries[0] == binaries[1], f"{name}: binary size/content changed"
        assert outputs[0] == outputs[1], f"{name}: runtime behavior changed"
    print(
        f"\nACCEPTANCE PASS: pragma transparency, {len(TRANSPARENCY_INPUTS)} corpus "
        "files byte-identical to stripped twins"
    )


# -- criterion 8 [secondary]: end-to-end determinism ------------------------------

def _run_fixture(tmp_path, fixtures_dir, shim_dir, name, subdir):
    out = tmp_path / subdir
    config = RunConfig(
        input_path=str(fixtures_dir / name),
        output_dir=str(out),
        shim_dir=str(shim_dir),
        json_path="records.json",
    )
    analysis, specs = runner.precompile(config)
    assert analysis.ok
    runner.write_filespecs(specs, out)
    exe = runner.build(specs, config)
    report = runner.run_and_collect(exe, config)
    return report, (out / "records.json").read_bytes()


def test_end_to_end_determinism(tmp_path, fixtures_dir, shim_dir):
    report, first_bytes = _run_fixture(
        tmp_path, fixtures_dir, shim_dir, "tick_loop8.c", "a"
    )
    assert len(report.records) == 8
    assert [r.temporal_id for r in report.records] == list(range(8))
    for record in report.records:
        assert record.name == "tick-loop"
        assert record.counters == {"memory.loads": 1}
    assert report.per_region_totals == {"tick-loop": {"memory.loads": 8}}

    _, second_bytes = _run_fixture(
        tmp_path, fixtures_dir, shim_dir, "tick_loop8.c", "b"
    )
    assert first_bytes == second_bytes
    json.loads(first_bytes)  # stays valid JSON
    print("\nACCEPTANCE PASS: end-to-end determinism, 8 records, byte-identical reruns")


# -- criterion 9 [secondary]: nesting and overlap correctness ---------------------

def test_nesting_and_overlap_totals(tmp_path, fixtures_dir, shim_dir):
    nested, _ = _run_fixture(tmp_path, fixtures_dir, shim_dir, "nested_ticks.c", "nested")
    by_name = {r.name: r.counters for r in nested.records}
    assert by_name == {
        "inner": {"memory.loads": 5},
        "outer": {"cpu.cycles": 11},  # 1 + 3 (inside inner) + 7, inclusive
    }

    overlap, _ = _run_fixture(tmp_path, fixtures_dir, shim_dir, "overlap_ticks.c", "overlap")
    by_name = {r.name: r.counters for r in overlap.records}
    assert by_name == {
        "alpha": {"cpu.cycles": 11},     # 1 + 10, stops during beta
        "beta": {"memory.stores": 6},    # 2 + 4, starts during alpha
    }

    # Pause-window exclusion, scripted directly against the runtime.
    driver = tmp_path / "pause_driver.c"
    driver.write_text(
        '#include "edpm_shim.h"\n'
        "#include <stdio.h>\n"
        "int main(void)\n"
        "{\n"
        '    static const char *const names[1] = { "cpu.cycles" };\n'
        "    long long values[1];\n"
        '    edpm_shim_init("pause.json");\n'
        "    edpm_soft_block_create(names, 1);\n"
        "    edpm_soft_block_start();\n"
        '    edpm_soft_tick("cpu.cycles", 3);\n'
        "    edpm_soft_pause();\n"
        '    edpm_soft_tick("cpu.cycles", 5);\n'
        "    edpm_soft_resume();\n"
        '    edpm_soft_tick("cpu.cycles", 2);\n'
        "    edpm_soft_read(values);\n"
        "    edpm_soft_block_destroy();\n"
        "    edpm_shim_finalize();\n"
        '    printf("%lld\\n", values[0]);\n'
        "    return 0;\n"
        "}\n"
    )
    exe = tmp_path / "pause_driver"
    proc = subprocess.run(
        ["cc", "-I", str(shim_dir), "-o", str(exe), str(driver),
         str(shim_dir / "edpm_shim.c")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    run = subprocess.run([str(exe)], cwd=tmp_path, capture_output=True, text=True)
    assert run.returncode == 0
    assert run.stdout.strip() == "5"  # 3 + 2; the paused tick of 5 is discarded
    print("\nACCEPTANCE PASS: nesting/overlap totals exact, pause window excluded")


# -- criterion 10 [secondary]: overhead -------------------------------------------

def test_overhead_within_bound(tmp_path, shim_dir):
    began = time.perf_counter()
    result = runner.bench_overhead(
        tmp_path, repetitions=10, shim_dir=str(shim_dir)
    )
    elapsed = time.perf_counter() - began
    ratio = result["overhead_ratio"]
    assert 0.85 <= ratio <= 1.15, f"overhead ratio {ratio:.3f} outside 15%"
    assert elapsed < 60.0, f"bench took {elapsed:.0f}s"
    print(
        f"\nACCEPTANCE PASS: overhead ratio {ratio:.3f} "
        f"(baseline {result['baseline_mean_ms']:.1f} ms, "
        f"instrumented {result['instrumented_mean_ms']:.1f} ms, "
        f"10 repetitions in {elapsed:.0f}s)"
    )
