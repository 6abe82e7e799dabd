"""Command-line driver: synthesis runs, benchmarking, model statistics.

Exit codes: 0 success, 1 diagnostics (bad input, bad flags), 2 empty
supervisor, 3 internal invariant violation.  Every reported metric except
the wall time is a deterministic function of the model and configuration.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
import time
from pathlib import Path

from .emit import emit
from .model import Specification, model_stats, validate
from .oracle import ExplicitOracle, UniverseTooLarge
from .parser import ParseError, parse_spec, unparse
from .synthesis import SynthesisConfig, SynthesisResult, synthesize
from .transform import LinearModel, linearize, plantify

__all__ = ["main"]

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_EMPTY = 2
EXIT_INTERNAL = 3


class Failure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def _read_spec(path: Path, allow_supervisor: bool = False) -> Specification:
    try:
        text = path.read_text()
    except OSError as exc:
        raise Failure(EXIT_DIAGNOSTICS, f"cannot read {path}: {exc}")
    try:
        spec = parse_spec(text, str(path))
    except ParseError as exc:
        raise Failure(EXIT_DIAGNOSTICS, str(exc.diagnostic))
    diags = validate(spec, allow_supervisor=allow_supervisor)
    if diags:
        raise Failure(
            EXIT_DIAGNOSTICS, "\n".join(str(d) for d in diags)
        )
    return spec


def _linearized(spec: Specification) -> tuple[Specification, LinearModel]:
    plant = plantify(spec)
    model, diags = linearize(plant)
    if diags:
        raise Failure(
            EXIT_DIAGNOSTICS, "\n".join(str(d) for d in diags)
        )
    return plant, model


def _config(args) -> SynthesisConfig:
    try:
        config = SynthesisConfig.preset(args.config)
    except ValueError as exc:
        raise Failure(EXIT_DIAGNOSTICS, str(exc))
    if args.order is not None:
        config.order = args.order
    if args.granularity is not None:
        config.granularity = args.granularity
    if args.edge_apply is not None:
        config.edge_apply = args.edge_apply
    if args.early_stop is not None:
        config.early_stop = args.early_stop == "on"
    if args.forward is not None:
        config.forward = args.forward == "on"
    if args.plant_inv is not None:
        config.plant_inv = args.plant_inv
    return config


def _fingerprint(config: SynthesisConfig, simplify: bool | None = None) -> str:
    parts = [
        f"order={config.order}",
        f"granularity={config.granularity}",
        f"edge-apply={config.edge_apply}",
        f"early-stop={'on' if config.early_stop else 'off'}",
        f"forward={'on' if config.forward else 'off'}",
        f"plant-inv={config.plant_inv}",
    ]
    if simplify is not None:
        parts.append(f"simplify={'on' if simplify else 'off'}")
    return " ".join(parts)


# ----------------------------------------------------------------------
# run


def _report(path: Path, config: SynthesisConfig, result: SynthesisResult,
            simplify: bool, wall: float) -> dict:
    m = result.metrics
    return {
        "schema": 1,
        "model": path.stem,
        "config": _fingerprint(config, simplify),
        "variables": m["variables"],
        "bdd_levels": m["bdd_levels"],
        "order": m["order"],
        "wes": m["wes"],
        "operations": m["operations"],
        "stage_operations": m["stage_operations"],
        "peak_nodes": m["peak_nodes"],
        "live_nodes": m["live_nodes"],
        "allocated_nodes": m["allocated_nodes"],
        "edge_applications": m["edge_applications"],
        "reach_calls": m["reach_calls"],
        "sweeps": m["sweeps"],
        "uncontrolled_states": m["uncontrolled_states"],
        "controlled_states": m["controlled_states"],
        "empty_supervisor": not result.nonempty,
        "wall_time_s": round(wall, 6),
    }


def _print_report(report: dict) -> None:
    skip = {"schema", "stage_operations", "order"}
    width = max(len(key) for key in report)
    for key, value in report.items():
        if key in skip:
            continue
        print(f"{key:<{width}}  {value}")
        if key == "operations":
            for stage, ops in report["stage_operations"].items():
                print(f"  {stage:<{width - 2}}  {ops}")


def cmd_run(args) -> int:
    path = Path(args.model)
    spec = _read_spec(path)
    plant, model = _linearized(spec)
    config = _config(args)
    simplify = args.simplify == "on"
    start = time.perf_counter()
    result = synthesize(model, config)
    wall = time.perf_counter() - start
    report = _report(path, config, result, simplify, wall)
    _print_report(report)
    if args.stats_json:
        Path(args.stats_json).write_text(json.dumps(report, indent=2) + "\n")
    if not result.nonempty:
        print("empty supervisor")
        return EXIT_EMPTY
    out_path = Path(args.out) if args.out else path.with_suffix(".sup.efa")
    out_path.write_text(unparse(emit(plant, result, simplify=simplify)))
    print(f"wrote {out_path}")
    return EXIT_OK


# ----------------------------------------------------------------------
# bench

BENCH_COLUMNS = [
    "model", "config", "operations", "peak_nodes", "uncontrolled_states",
    "controlled_states", "edge_applications", "op_factor", "node_factor",
    "deterministic",
]


def cmd_bench(args) -> int:
    suite = Path(args.dir)
    paths = sorted(
        p for p in suite.glob("*.efa") if not p.name.endswith(".sup.efa")
    )
    if not paths:
        raise Failure(EXIT_DIAGNOSTICS, f"no .efa models in {suite}")
    configs = [c.strip() for c in args.configs.split(",") if c.strip()]
    if not configs:
        raise Failure(EXIT_DIAGNOSTICS, "no configurations given")
    for name in configs:
        try:
            SynthesisConfig.preset(name)
        except ValueError as exc:
            raise Failure(EXIT_DIAGNOSTICS, str(exc))

    rows = []
    for path in paths:
        spec = _read_spec(path)
        plant, model = _linearized(spec)
        for name in configs:
            reps = [
                synthesize(model, SynthesisConfig.preset(name)).metrics
                for _ in range(args.reps)
            ]
            first = reps[0]
            rows.append({
                "model": path.stem,
                "config": name,
                "operations": first["operations"],
                "peak_nodes": first["peak_nodes"],
                "uncontrolled_states": first["uncontrolled_states"],
                "controlled_states": first["controlled_states"],
                "edge_applications": first["edge_applications"],
                "deterministic": all(m == first for m in reps),
            })

    baseline = {
        row["model"]: row for row in rows if row["config"] == configs[0]
    }
    for row in rows:
        base = baseline[row["model"]]
        row["op_factor"] = round(base["operations"] / row["operations"], 3)
        row["node_factor"] = round(base["peak_nodes"] / row["peak_nodes"], 3)

    rows = [{key: row[key] for key in BENCH_COLUMNS} for row in rows]
    widths = {
        key: max(len(key), *(len(str(row[key])) for row in rows))
        for key in BENCH_COLUMNS
    }
    print("  ".join(key.ljust(widths[key]) for key in BENCH_COLUMNS))
    for row in rows:
        print("  ".join(
            str(row[key]).ljust(widths[key]) for key in BENCH_COLUMNS
        ))
    if any(not row["deterministic"] for row in rows):
        print("warning: non-identical repetitions flagged above")

    if args.csv:
        with open(args.csv, "w", newline="") as handle:
            writer = csv.DictWriter(handle, fieldnames=BENCH_COLUMNS)
            writer.writeheader()
            writer.writerows(rows)
    if args.json:
        payload = {"schema": 1, "baseline": configs[0], "rows": rows}
        Path(args.json).write_text(json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


# ----------------------------------------------------------------------
# stats and oracle


def cmd_stats(args) -> int:
    spec = _read_spec(Path(args.model), allow_supervisor=True)
    stats = model_stats(spec)
    for field in dataclasses.fields(stats):
        print(f"{field.name:<8}{getattr(stats, field.name)}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    spec = _read_spec(Path(args.model), allow_supervisor=True)
    plant, model = _linearized(spec)
    try:
        oracle = ExplicitOracle(model, cap=args.cap)
    except UniverseTooLarge as exc:
        raise Failure(EXIT_DIAGNOSTICS, str(exc))
    lines = [
        ("universe", len(oracle.states)),
        ("initial", len(oracle.initial)),
        ("marked", len(oracle.marked)),
        ("forbidden", len(oracle.forbidden)),
        ("safe", len(oracle.safe)),
        ("uncontrolled_states", len(oracle.plant_reachable)),
        ("controlled_states",
         len(oracle.controlled_reachable) if oracle.nonempty else 0),
        ("empty_supervisor", not oracle.nonempty),
    ]
    for key, value in lines:
        print(f"{key:<20}  {value}")
    return EXIT_OK


# ----------------------------------------------------------------------
# argument plumbing


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which collides with the
    # empty-supervisor code; usage problems are diagnostics here.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise Failure(EXIT_DIAGNOSTICS, message)


def _onoff(parser, name, help):
    parser.add_argument(name, choices=["on", "off"], default=None, help=help)


def _build_parser() -> _Parser:
    parser = _Parser(prog="synth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="synthesize a supervisor for one model")
    run.add_argument("model", help="input .efa file")
    run.add_argument("--config", default="v40", help="preset: v08 or v40")
    run.add_argument("--order", default=None,
                     help="ordering strategy (e.g. pipeline-v08, pipeline-v40,"
                          " dcsh, force, sloan, cm, model, custom:a,b,c)")
    run.add_argument("--granularity", choices=["edge", "event"], default=None)
    run.add_argument("--edge-apply", choices=["naive", "compound"],
                     default=None, dest="edge_apply")
    _onoff(run, "--early-stop", "stop fixed points at idempotence")
    _onoff(run, "--forward", "add the forward reachability stage")
    run.add_argument("--plant-inv", choices=["implication", "restrict"],
                     default=None, dest="plant_inv")
    run.add_argument("--simplify", choices=["on", "off"], default="on",
                     help="simplify emitted guards against the context")
    run.add_argument("--stats-json", default=None, dest="stats_json",
                     help="also write the report as JSON")
    run.add_argument("--out", default=None, help="output model path")
    run.set_defaults(func=cmd_run)

    bench = sub.add_parser("bench", help="compare configurations on a suite")
    bench.add_argument("dir", help="directory of .efa models")
    bench.add_argument("--configs", default="v08,v40",
                       help="comma-separated presets; first is the baseline")
    bench.add_argument("--reps", type=int, default=2,
                       help="repetitions per run to verify determinism")
    bench.add_argument("--csv", default=None, help="write the table as CSV")
    bench.add_argument("--json", default=None, help="write the table as JSON")
    bench.set_defaults(func=cmd_bench)

    stats = sub.add_parser("stats", help="structural model statistics")
    stats.add_argument("model")
    stats.set_defaults(func=cmd_stats)

    oracle = sub.add_parser(
        "oracle", help="explicit-state cross-check (small models only)"
    )
    oracle.add_argument("model")
    oracle.add_argument("--cap", type=int, default=10 ** 6,
                        help="refuse universes larger than this")
    oracle.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        return args.func(args)
    except Failure as failure:
        if failure.message:
            print(failure.message, file=sys.stderr)
        return failure.code
    except Exception as exc:  # noqa: BLE001 - exit code contract
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
