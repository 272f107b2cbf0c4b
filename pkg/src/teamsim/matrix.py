"""Experiment matrices: cell enumeration, per-cell seed derivation, parallel
execution, record persistence, and condition summaries.

Cell seeds are sha256(base_seed | persona | benchmark | condition | scheme |
N | rep | attempt), so adding cells to a matrix never perturbs the seeds of
existing ones and reruns are byte-identical regardless of the --jobs
setting: records are collected by a single writer in deterministic cell
order.
"""
from __future__ import annotations

import csv
import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .agents import AgentProfile
from .metrics import MetricsReport, summarize_cell
from .orchestrator import CoordinationScheme, RunConfig, RunRecord, run
from .taskgraph import CONDITION_P, DependencyCondition, build_benchmark


@dataclass(frozen=True)
class ExperimentMatrix:
    benchmarks: tuple[str, ...] = ("mathutils",)
    conditions: tuple[str, ...] = ("parallel", "mixed", "serial")
    schemes: tuple[str, ...] = ("preassigned", "decentralized")
    agents: tuple[int, ...] = (1, 2, 3, 4, 5)
    personas: tuple[str, ...] = ("ideal",)
    repetitions: int = 5
    base_seed: int = 0
    round_cap: int = 60
    retries: int = 2
    reclaim_after: int = 4

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")

    def cells(self):
        for persona in self.personas:
            for benchmark in self.benchmarks:
                for condition in self.conditions:
                    for scheme in self.schemes:
                        for n in self.agents:
                            yield (persona, benchmark, condition, scheme, n)


def derive_seed(base_seed: int, persona: str, benchmark: str, condition: str,
                scheme: str, n: int, rep: int, attempt: int = 0) -> int:
    key = f"{base_seed}|{persona}|{benchmark}|{condition}|{scheme}|{n}|{rep}|{attempt}"
    digest = hashlib.sha256(key.encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _run_rep(args) -> list[RunRecord]:
    """Execute one repetition of one cell, retrying timed-out runs."""
    matrix, profile, persona, benchmark, condition, scheme, n, rep = args
    graph = build_benchmark(benchmark, DependencyCondition.named(condition))
    records = []
    for attempt in range(matrix.retries + 1):
        config = RunConfig(
            graph=graph,
            scheme=CoordinationScheme(kind=scheme,
                                      reclaim_after=matrix.reclaim_after),
            n_agents=n,
            profile=profile,
            seed=derive_seed(matrix.base_seed, persona, benchmark, condition,
                             scheme, n, rep, attempt),
            round_cap=matrix.round_cap,
            persona=persona,
            benchmark=benchmark,
            condition=condition,
        )
        record = run(config)
        record.config["rep"] = rep
        record.config["attempt"] = attempt
        records.append(record)
        if record.success:
            break
    return records


def run_matrix(
    matrix: ExperimentMatrix,
    personas: dict[str, AgentProfile],
    jobs: int = 1,
) -> list[RunRecord]:
    """Run every cell x repetition; returns all records (including retried
    attempts) in deterministic cell order regardless of completion order."""
    tasks = [
        (matrix, personas[persona], persona, benchmark, condition, scheme, n, rep)
        for (persona, benchmark, condition, scheme, n) in matrix.cells()
        for rep in range(matrix.repetitions)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            nested = list(pool.map(_run_rep, tasks, chunksize=4))
    else:
        nested = [_run_rep(t) for t in tasks]
    return [record for group in nested for record in group]


def final_attempts(records: list[RunRecord]) -> list[RunRecord]:
    """Keep only the last attempt of each (cell, rep)."""
    by_rep: dict[tuple, RunRecord] = {}
    for r in records:
        c = r.config
        key = (c["persona"], c["benchmark"], c["condition"], c["scheme"],
               c["n_agents"], c.get("rep", 0))
        prev = by_rep.get(key)
        if prev is None or c.get("attempt", 0) >= prev.config.get("attempt", 0):
            by_rep[key] = r
    return list(by_rep.values())


def summarize(records: list[RunRecord]) -> list[MetricsReport]:
    """One MetricsReport per cell, with speedups and token multipliers taken
    against the matched N=1 cell of the same persona/benchmark/condition/scheme.
    Timed-out attempts are dropped in favor of their retries first."""
    finals = final_attempts(records)
    cells: dict[tuple, list[RunRecord]] = {}
    for r in finals:
        c = r.config
        key = (c["persona"], c["benchmark"], c["condition"], c["scheme"],
               c["n_agents"])
        cells.setdefault(key, []).append(r)

    def cell_means(key):
        runs = [r for r in cells.get(key, []) if r.success]
        if not runs:
            return None, None
        wc = sum(r.wall_clock_seconds for r in runs) / len(runs)
        tok = sum(r.total_tokens for r in runs) / len(runs)
        return wc, tok

    reports = []
    for key in sorted(cells):
        persona, benchmark, condition, scheme, n = key
        base_wc, base_tok = cell_means((persona, benchmark, condition, scheme, 1))
        reports.append(
            summarize_cell(
                sorted(cells[key], key=lambda r: r.config.get("rep", 0)),
                p=CONDITION_P[condition],
                baseline_wall_clock=base_wc,
                baseline_tokens=base_tok,
            )
        )
    return reports


def write_records(records: list[RunRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(r.to_json())
            fh.write("\n")


def read_records(path: str) -> list[RunRecord]:
    with open(path, encoding="utf-8") as fh:
        return [RunRecord.from_json(line) for line in fh if line.strip()]


def write_summary(reports: list[MetricsReport], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=MetricsReport.CSV_FIELDS)
        writer.writeheader()
        for report in reports:
            row = {k: ("" if v is None else v) for k, v in report.csv_row().items()}
            writer.writerow(row)


def read_summary(path: str) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
