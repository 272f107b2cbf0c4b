"""Per-run and per-condition metrics: speedup against the Amdahl bound,
token multipliers and efficiency gaps, overhead counts, and straggler gaps.
"""
from __future__ import annotations

import statistics
from dataclasses import dataclass, field

from .orchestrator import RunRecord


def amdahl_bound(p: float, s: float) -> float:
    """Predicted speedup ceiling 1 / ((1 - p) + p / s)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"parallel fraction must be in [0, 1], got {p}")
    if s < 1:
        raise ValueError(f"processor count must be >= 1, got {s}")
    return 1.0 / ((1.0 - p) + p / s)


def speedup(t_baseline: float, t_team: float) -> float:
    """S(N) = T(1) / T(N); values below 1 indicate slowdown."""
    if t_baseline <= 0 or t_team <= 0:
        raise ValueError("wall-clock times must be positive")
    return t_baseline / t_team


def straggler_gap(values: list[float]) -> float:
    """Slowest value minus the mean of the rest; 0 for a single value.

    Ties are broken by removing one maximal entry.
    """
    if not values:
        raise ValueError("need at least one value")
    if any(v < 0 for v in values):
        raise ValueError("values must be nonnegative")
    if len(values) == 1:
        return 0.0
    rest = sorted(values)
    slowest = rest.pop()
    return slowest - statistics.fmean(rest)


def straggler_gap_per_round(record: RunRecord) -> float:
    """Alternate per-round definition: mean over rounds of max minus mean
    latency within the round."""
    gaps = []
    for r in record.rounds:
        lats = [a["latency"] for a in r["agents"]]
        if len(lats) < 2:
            return 0.0
        mx = max(lats)
        gaps.append(mx - statistics.fmean(lats))
    return statistics.fmean(gaps) if gaps else 0.0


def overhead_counts(record: RunRecord) -> tuple[int, int]:
    """(total messages, total idle agent-rounds) for one run."""
    return sum(record.messages_per_agent), sum(record.idle_rounds_per_agent)


def token_multiplier(record: RunRecord, baseline_tokens: float) -> float:
    """Run tokens over the matched single-agent baseline mean."""
    if baseline_tokens <= 0:
        raise ValueError("baseline tokens must be positive")
    return record.total_tokens / baseline_tokens


def efficiency_gap(multiplier: float, speedup_value: float) -> float:
    """Token multiplier minus speedup; positive means costs outpace speedup."""
    return multiplier - speedup_value


def conflict_counts(record: RunRecord) -> dict[str, int]:
    counts = {"ConcurrentWrite": 0, "Rewrite": 0, "TemporalViolation": 0}
    for c in record.conflicts:
        counts[c.kind] += 1
    return counts


@dataclass
class MetricsReport:
    """Aggregate summary for one condition cell of the experiment matrix."""

    benchmark: str
    condition: str
    scheme: str
    persona: str
    n_agents: int
    runs: int
    successes: int
    success_rate: float
    mean_wall_clock: float | None
    mean_tokens: float | None
    speedup: float | None
    amdahl: float
    token_multiplier: float | None
    efficiency_gap: float | None
    straggler_gap_mean: float
    straggler_gap_median: float
    messages: int
    idle_rounds: int
    concurrent_writes: int
    rewrites: int
    temporal_violations: int
    failed_tests: int
    claim_denials: int
    lock_denials: int

    CSV_FIELDS = [
        "benchmark", "condition", "scheme", "persona", "n_agents", "runs",
        "successes", "success_rate", "mean_wall_clock", "mean_tokens",
        "speedup", "amdahl", "token_multiplier", "efficiency_gap",
        "straggler_gap_mean", "straggler_gap_median", "messages",
        "idle_rounds", "concurrent_writes", "rewrites",
        "temporal_violations", "failed_tests", "claim_denials",
        "lock_denials",
    ]

    def csv_row(self) -> dict:
        return {name: getattr(self, name) for name in self.CSV_FIELDS}


def summarize_cell(
    records: list[RunRecord],
    p: float,
    baseline_wall_clock: float | None,
    baseline_tokens: float | None,
) -> MetricsReport:
    """Build one MetricsReport from the runs of a single matrix cell.

    Speedup and token multiplier use the matched N=1 cell's means; cells with
    no successful runs (or no baseline) report them as absent, never zero.
    """
    if not records:
        raise ValueError("cell has no records")
    cfg = records[0].config
    successful = [r for r in records if r.success]
    mean_wc = (
        statistics.fmean(r.wall_clock_seconds for r in successful)
        if successful else None
    )
    mean_tokens = (
        statistics.fmean(r.total_tokens for r in successful)
        if successful else None
    )
    s = None
    if mean_wc is not None and baseline_wall_clock:
        s = speedup(baseline_wall_clock, mean_wc)
    mult = None
    gap = None
    if mean_tokens is not None and baseline_tokens:
        mult = mean_tokens / baseline_tokens
        if s is not None:
            gap = efficiency_gap(mult, s)
    gaps = [straggler_gap(r.completion_times) for r in records]
    conflicts = [conflict_counts(r) for r in records]
    return MetricsReport(
        benchmark=cfg["benchmark"],
        condition=cfg["condition"],
        scheme=cfg["scheme"],
        persona=cfg["persona"],
        n_agents=cfg["n_agents"],
        runs=len(records),
        successes=len(successful),
        success_rate=len(successful) / len(records),
        mean_wall_clock=mean_wc,
        mean_tokens=mean_tokens,
        speedup=s,
        amdahl=amdahl_bound(p, cfg["n_agents"]),
        token_multiplier=mult,
        efficiency_gap=gap,
        straggler_gap_mean=statistics.fmean(gaps),
        straggler_gap_median=statistics.median(gaps),
        messages=sum(sum(r.messages_per_agent) for r in records),
        idle_rounds=sum(sum(r.idle_rounds_per_agent) for r in records),
        concurrent_writes=sum(c["ConcurrentWrite"] for c in conflicts),
        rewrites=sum(c["Rewrite"] for c in conflicts),
        temporal_violations=sum(c["TemporalViolation"] for c in conflicts),
        failed_tests=sum(sum(r.failed_tests_per_round.values()) for r in records),
        claim_denials=sum(r.claim_denials for r in records),
        lock_denials=sum(r.lock_denials for r in records),
    )
