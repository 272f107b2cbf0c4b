"""Command-line entry points.

Subcommands:
  run    execute an experiment matrix; writes records.jsonl, summary.csv,
         and plots/*.svg under --out
  plot   re-render figures from an existing records file
  graph  print a benchmark task graph as JSON
"""
from __future__ import annotations

import argparse
import sys

from .matrix import (
    ExperimentMatrix,
    read_records,
    run_matrix,
    summarize,
    write_records,
    write_summary,
)
from .presets import load_personas
from .plots import emit_plots
from .taskgraph import BENCHMARKS, CONDITION_P, DependencyCondition, build_benchmark

import os


def _choices(values, extra=()):
    return list(values) + list(extra)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="teamsim",
        description="Deterministic multi-agent team coordination simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment matrix")
    run_p.add_argument("--benchmark", default="mathutils",
                       choices=_choices(BENCHMARKS, ("all",)))
    run_p.add_argument("--condition", default="all",
                       choices=_choices(CONDITION_P, ("all",)))
    run_p.add_argument("--scheme", default="both",
                       choices=["preassign", "decentralized", "both"])
    run_p.add_argument("--agents", default="1,2,3,4,5",
                       help="comma-separated team sizes")
    run_p.add_argument("--reps", type=int, default=5)
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--persona", default="ideal",
                       help="comma-separated persona names from the config")
    run_p.add_argument("--round-cap", type=int, default=60)
    run_p.add_argument("--retries", type=int, default=2)
    run_p.add_argument("--reclaim-after", type=int, default=4)
    run_p.add_argument("--jobs", type=int, default=1)
    run_p.add_argument("--config", default=None,
                       help="JSON persona config file")
    run_p.add_argument("--out", required=True, help="output directory")
    run_p.add_argument("--no-plots", action="store_true")

    plot_p = sub.add_parser("plot", help="render figures from a records file")
    plot_p.add_argument("--records", required=True)
    plot_p.add_argument("--out", required=True)

    graph_p = sub.add_parser("graph", help="print a benchmark graph as JSON")
    graph_p.add_argument("--benchmark", default="mathutils", choices=BENCHMARKS)
    graph_p.add_argument("--condition", default="parallel",
                         choices=sorted(CONDITION_P))

    return parser


def _scheme_list(value: str) -> tuple[str, ...]:
    if value == "both":
        return ("preassigned", "decentralized")
    if value == "preassign":
        return ("preassigned",)
    return ("decentralized",)


def cmd_run(args) -> int:
    try:
        os.makedirs(args.out, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot write to {args.out}: {exc}", file=sys.stderr)
        return 2
    personas = load_personas(args.config)
    requested = tuple(p.strip() for p in args.persona.split(",") if p.strip())
    missing = [p for p in requested if p not in personas]
    if missing:
        print(f"error: unknown personas {missing}; known: {sorted(personas)}",
              file=sys.stderr)
        return 2
    matrix = ExperimentMatrix(
        benchmarks=tuple(BENCHMARKS) if args.benchmark == "all"
        else (args.benchmark,),
        conditions=tuple(sorted(CONDITION_P)) if args.condition == "all"
        else (args.condition,),
        schemes=_scheme_list(args.scheme),
        agents=tuple(int(n) for n in args.agents.split(",")),
        personas=requested,
        repetitions=args.reps,
        base_seed=args.seed,
        round_cap=args.round_cap,
        retries=args.retries,
        reclaim_after=args.reclaim_after,
    )
    records = run_matrix(matrix, personas, jobs=args.jobs)
    records_path = os.path.join(args.out, "records.jsonl")
    summary_path = os.path.join(args.out, "summary.csv")
    write_records(records, records_path)
    reports = summarize(records)
    write_summary(reports, summary_path)
    print(f"wrote {len(records)} records to {records_path}")
    print(f"wrote {len(reports)} summary rows to {summary_path}")
    if not args.no_plots:
        emitted, warnings = emit_plots(reports, args.out)
        for path in emitted:
            print(f"wrote {path}")
        for warning in warnings:
            print(f"warning: {warning}", file=sys.stderr)
    return 0


def cmd_plot(args) -> int:
    records = read_records(args.records)
    reports = summarize(records)
    os.makedirs(args.out, exist_ok=True)
    emitted, warnings = emit_plots(reports, args.out)
    for path in emitted:
        print(f"wrote {path}")
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0 if emitted or not warnings else 1


def cmd_graph(args) -> int:
    graph = build_benchmark(args.benchmark, DependencyCondition.named(args.condition))
    print(graph.to_json())
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": cmd_run, "plot": cmd_plot, "graph": cmd_graph}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
