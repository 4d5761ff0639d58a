"""Command-line interface: precompile, build, run, report, bench.

Exit codes: 0 success, 1 diagnostics or run failure, 2 environment failure
(compiler or backend library missing).
"""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
from pathlib import Path

from . import analyzer, runner
from .runner import RunConfig, RunnerError


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", help="annotated C source file")
    parser.add_argument(
        "--backend", choices=("soft", "papi"), default="soft", help="code generation backend"
    )
    parser.add_argument("-o", "--output-dir", default=None, help="directory for generated files")
    parser.add_argument("--json", default="edpm.json", help="record file path for the run")
    parser.add_argument(
        "--buffered", action="store_true", help="buffer region records until deinit"
    )


def _add_build_opts(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--cc", default="cc", help="compiler command, honored verbatim")
    parser.add_argument("--shim-dir", default=None, help="directory with the soft runtime shim")


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edpm", description="pragma-driven performance monitoring precompiler"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("precompile", help="generate instrumented sources")
    _add_common(p)
    p.add_argument(
        "--dump-analysis", action="store_true", help="print the analysis dump and IR"
    )

    p = sub.add_parser("build", help="precompile and compile to an executable")
    _add_common(p)
    _add_build_opts(p)

    p = sub.add_parser("run", help="precompile, build, execute, and collect records")
    _add_common(p)
    _add_build_opts(p)
    p.add_argument("--reps", type=int, default=1, help="number of repetitions")
    p.add_argument("--emit-only", action="store_true", help="stop after generating files")
    p.add_argument(
        "--keep-generated", action="store_true", help="keep the working directory"
    )
    p.add_argument("--report-json", default=None, help="write the run report as JSON")

    p = sub.add_parser("report", help="aggregate an existing record file")
    p.add_argument("records", help="JSON record file produced by a run")
    p.add_argument("--json-out", default=None, help="write aggregated totals as JSON")

    p = sub.add_parser("bench", help="lines-of-code and overhead evaluation")
    p.add_argument("--reps", type=int, default=10, help="repetitions for the overhead run")
    p.add_argument("--cc", default="cc", help="compiler command, honored verbatim")
    p.add_argument("--shim-dir", default=None)
    p.add_argument("-o", "--output-dir", default=None)
    p.add_argument("--workload", default=None, help="override the bundled workload")
    p.add_argument("--skip-overhead", action="store_true")
    p.add_argument("--skip-loc", action="store_true")
    p.add_argument("--json-out", default=None, help="write the evaluation as JSON")

    return parser


def _print_diagnostics(path: str, analysis) -> None:
    for diag in analysis.diagnostics:
        print(diag.render(path), file=sys.stderr)


def _config_from_args(args, emit_only: bool = False) -> RunConfig:
    return RunConfig(
        input_path=args.input,
        backend=args.backend,
        emit_only=emit_only,
        output_dir=args.output_dir,
        json_path=args.json,
        compiler_command=getattr(args, "cc", "cc"),
        repetitions=getattr(args, "reps", 1),
        shim_dir=getattr(args, "shim_dir", None),
        keep_generated=getattr(args, "keep_generated", False),
        buffered=args.buffered,
    )


def _precompile_to_dir(config: RunConfig) -> tuple[object, list]:
    analysis, specs = runner.precompile(config)
    if not analysis.ok:
        _print_diagnostics(config.input_path, analysis)
        return analysis, []
    runner.write_filespecs(specs, config.output_dir or ".")
    return analysis, specs


def _cmd_precompile(args) -> int:
    config = _config_from_args(args, emit_only=True)
    config.output_dir = config.output_dir or "."
    analysis, specs = _precompile_to_dir(config)
    if not analysis.ok:
        return 1
    if args.dump_analysis:
        print(analyzer.dump(analysis), end="")
    for spec in specs:
        print(f"{spec.role}: {Path(config.output_dir) / spec.path}")
    return 0


def _cmd_build(args) -> int:
    config = _config_from_args(args)
    config.output_dir = config.output_dir or "."
    analysis, specs = _precompile_to_dir(config)
    if not analysis.ok:
        return 1
    exe = runner.build(specs, config)
    print(exe)
    return 0


def _totals_table(totals: dict[str, dict[str, int]]) -> str:
    rows = [
        (name, counter, str(value))
        for name in sorted(totals)
        for counter, value in sorted(totals[name].items())
    ]
    if not rows:
        return "(no records)"
    widths = [max(len(r[i]) for r in rows + [("region", "counter", "total")]) for i in range(3)]
    lines = [
        f"{'region':<{widths[0]}}  {'counter':<{widths[1]}}  {'total':>{widths[2]}}"
    ]
    lines.append("  ".join("-" * w for w in widths))
    for name, counter, value in rows:
        lines.append(f"{name:<{widths[0]}}  {counter:<{widths[1]}}  {value:>{widths[2]}}")
    return "\n".join(lines)


def _cmd_run(args) -> int:
    config = _config_from_args(args, emit_only=args.emit_only)
    temp = None
    if config.output_dir is None:
        if config.emit_only:
            config.output_dir = "."  # emit-only exists to keep the files
        elif config.keep_generated:
            config.output_dir = tempfile.mkdtemp(prefix="edpm-")
            print(f"generated files kept in {config.output_dir}")
        else:
            temp = tempfile.TemporaryDirectory(prefix="edpm-")
            config.output_dir = temp.name
    try:
        analysis, specs = _precompile_to_dir(config)
        if not analysis.ok:
            return 1
        if config.emit_only:
            for spec in specs:
                print(f"{spec.role}: {Path(config.output_dir) / spec.path}")
            return 0
        exe = runner.build(specs, config)
        report = runner.run_and_collect(exe, config)
        print(f"runs: {len(report.wall_times_ms)}")
        mean = sum(report.wall_times_ms) / len(report.wall_times_ms)
        print(f"mean wall time: {mean:.2f} ms")
        print(f"records: {len(report.records)}")
        print(_totals_table(report.per_region_totals))
        if args.report_json:
            payload = {
                "records": [
                    {
                        "name": r.name,
                        "temporal-id": r.temporal_id,
                        "counters": r.counters,
                    }
                    for r in report.records
                ],
                "per_region_totals": report.per_region_totals,
                "wall_times_ms": report.wall_times_ms,
            }
            Path(args.report_json).write_text(json.dumps(payload, indent=2) + "\n")
        return 0
    finally:
        if temp is not None:
            temp.cleanup()


def _cmd_report(args) -> int:
    records = runner.parse_records(Path(args.records))
    totals = runner.aggregate(records)
    print(_totals_table(totals))
    if args.json_out:
        Path(args.json_out).write_text(json.dumps(totals, indent=2) + "\n")
    return 0


def _loc_table(rows: list[dict]) -> str:
    header = (
        f"{'config':<8}{'ann':>5}{'orig':>6}{'gen(s)':>8}{'gen(d)':>8}"
        f"{'gen/ann(s)':>12}{'gen/ann(d)':>12}{'ll/ann':>8}"
    )
    lines = [header, "-" * len(header)]
    for row in rows:
        static, dynamic = row["static"], row["dynamic"]
        lines.append(
            f"{row['config']:<8}{static.annotation_loc:>5}{static.original_loc:>6}"
            f"{static.generated_loc:>8}{dynamic.generated_loc:>8}"
            f"{static.ratio_generated_annotation:>12.2f}"
            f"{dynamic.ratio_generated_annotation:>12.2f}"
            f"{row['papi_ll_ratio']:>8.2f}"
        )
    lines.append(
        "reference (implementation-dependent, informational only): "
        f"generated/annotation {runner.REFERENCE_GENERATED_RATIO_STATIC} (static) / "
        f"{runner.REFERENCE_GENERATED_RATIO_DYNAMIC} (dynamic), "
        f"PAPI-low-level/annotation {runner.REFERENCE_PAPI_LL_RATIO[0]}"
        f"-{runner.REFERENCE_PAPI_LL_RATIO[1]}"
    )
    return "\n".join(lines)


def _cmd_bench(args) -> int:
    payload: dict = {}
    if not args.skip_loc:
        rows = runner.corpus_loc_table()
        print(_loc_table(rows))
        payload["loc"] = [
            {
                "config": row["config"],
                "annotation_loc": row["static"].annotation_loc,
                "static_generated_loc": row["static"].generated_loc,
                "dynamic_generated_loc": row["dynamic"].generated_loc,
                "papi_ll_monitoring_loc": row["papi_ll_monitoring_loc"],
                "papi_hl_monitoring_loc": row["papi_hl_monitoring_loc"],
                "papi_ll_ratio": row["papi_ll_ratio"],
            }
            for row in rows
        ]
    if not args.skip_overhead:
        with tempfile.TemporaryDirectory(prefix="edpm-bench-") as temp:
            out = args.output_dir or temp
            result = runner.bench_overhead(
                out,
                repetitions=args.reps,
                compiler_command=args.cc,
                shim_dir=args.shim_dir,
                workload=args.workload,
            )
        print(
            f"overhead: baseline {result['baseline_mean_ms']:.2f} ms, "
            f"instrumented {result['instrumented_mean_ms']:.2f} ms, "
            f"ratio {result['overhead_ratio']:.3f} "
            f"({args.reps} repetitions)"
        )
        payload["overhead"] = result
    if args.json_out:
        Path(args.json_out).write_text(json.dumps(payload, indent=2) + "\n")
    return 0


_COMMANDS = {
    "precompile": _cmd_precompile,
    "build": _cmd_build,
    "run": _cmd_run,
    "report": _cmd_report,
    "bench": _cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    args = _make_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except RunnerError as err:
        print(f"edpm: {err}", file=sys.stderr)
        return getattr(err, "exit_code", 1)


if __name__ == "__main__":
    sys.exit(main())
