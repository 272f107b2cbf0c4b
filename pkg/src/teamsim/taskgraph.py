"""Benchmark task DAGs: construction, readiness queries, and makespan bounds.

Every benchmark graph has M tasks where tasks 1..C form a strict sequential
chain and tasks C+1..M are mutually independent. The chain length C is derived
from the parallel fraction p as C = round((1 - p) * M). Three named benchmark
domains exist (mathutils, dataanalysis, svgrendering); they share the same
dependency structure and differ only in task labels.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


BENCHMARKS = ("mathutils", "dataanalysis", "svgrendering")

# Named dependency conditions: parallel fraction of the 20-task benchmark.
CONDITION_P = {"parallel": 0.9, "mixed": 0.5, "serial": 0.2}

_LABELS = {
    "mathutils": [
        "add", "safe_add", "sum_list", "mean", "variance", "stdev",
        "zscore", "normalize", "covariance", "correlation", "median",
        "mode", "geometric_mean", "harmonic_mean", "clamp", "lerp",
        "percentile", "rolling_mean", "weighted_mean", "rms",
    ],
    "dataanalysis": [
        "get_records", "remove_invalid", "add_revenue", "total_revenue",
        "revenue_by_region", "top_regions", "monthly_totals", "growth_rate",
        "forecast_next", "summary_report", "filter_by_date", "group_by_product",
        "sort_by_amount", "count_unique", "price_histogram", "dedupe_records",
        "join_customers", "flag_outliers", "average_basket", "export_rows",
    ],
    "svgrendering": [
        "fmt_num", "fmt_coord", "fmt_attrs", "open_tag", "close_tag",
        "element", "group", "document", "viewbox", "render_scene",
        "make_rect", "make_circle", "make_line", "make_ellipse",
        "make_polygon", "make_polyline", "make_path", "make_text",
        "make_style", "make_gradient",
    ],
}


class GraphError(ValueError):
    """Raised for invalid graphs, conditions, or query arguments."""


@dataclass(frozen=True)
class TaskSpec:
    """One benchmark subtask: an id, a short label, and its dependency ids."""

    id: int
    label: str
    deps: frozenset[int] = frozenset()
    work: int = 1

    def __post_init__(self):
        if self.id < 1:
            raise GraphError(f"task id must be >= 1, got {self.id}")
        if self.work < 1:
            raise GraphError(f"work must be >= 1, got {self.work}")
        if any(d >= self.id or d < 1 for d in self.deps):
            raise GraphError(
                f"task {self.id}: deps must be existing ids smaller than the "
                f"task's own id, got {sorted(self.deps)}"
            )


@dataclass(frozen=True)
class TaskGraph:
    """An immutable DAG of tasks with ids exactly 1..M.

    The deps-smaller-than-id invariant enforced per task guarantees
    acyclicity, including for externally loaded graphs.
    """

    tasks: tuple[TaskSpec, ...]

    def __post_init__(self):
        ids = [t.id for t in self.tasks]
        if ids != list(range(1, len(ids) + 1)):
            raise GraphError(f"task ids must be exactly 1..M in order, got {ids}")

    @property
    def m(self) -> int:
        return len(self.tasks)

    def task(self, task_id: int) -> TaskSpec:
        if not 1 <= task_id <= self.m:
            raise GraphError(f"unknown task id {task_id}")
        return self.tasks[task_id - 1]

    def deps(self, task_id: int) -> frozenset[int]:
        return self.task(task_id).deps

    def ancestors(self, task_id: int) -> frozenset[int]:
        """All transitive dependencies of a task."""
        seen: set[int] = set()
        stack = list(self.deps(task_id))
        while stack:
            d = stack.pop()
            if d not in seen:
                seen.add(d)
                stack.extend(self.deps(d))
        return frozenset(seen)

    def path_for(self, task_id: int) -> str:
        """Repository file path implementing a task."""
        t = self.task(task_id)
        return f"task_{t.id:02d}_{t.label}.py"

    def task_for_path(self, path: str) -> int:
        for t in self.tasks:
            if self.path_for(t.id) == path:
                return t.id
        raise GraphError(f"no task maps to path {path!r}")

    def to_json(self) -> str:
        doc = [
            {"id": t.id, "label": t.label, "deps": sorted(t.deps), "work": t.work}
            for t in self.tasks
        ]
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "TaskGraph":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphError(f"invalid graph document: {exc}") from exc
        if not isinstance(doc, list):
            raise GraphError("graph document must be a list of task objects")
        tasks = tuple(
            TaskSpec(
                id=int(item["id"]),
                label=str(item["label"]),
                deps=frozenset(int(d) for d in item.get("deps", [])),
                work=int(item.get("work", 1)),
            )
            for item in doc
        )
        return cls(tasks=tasks)


@dataclass(frozen=True)
class DependencyCondition:
    """Parallel fraction p and the chain length C it induces for M tasks."""

    p: float
    m: int = 20

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise GraphError(f"parallel fraction must be in [0, 1], got {self.p}")
        if self.m < 1:
            raise GraphError(f"task count must be >= 1, got {self.m}")
        if not 1 <= self.chain_length <= self.m:
            raise GraphError(
                f"chain length {self.chain_length} out of range for M={self.m}"
            )

    @property
    def chain_length(self) -> int:
        # round() half-even would give surprising chains for p=0.5 on odd M;
        # the benchmark conditions use round-half-up.
        return max(1, int(math.floor((1.0 - self.p) * self.m + 0.5)))

    @classmethod
    def named(cls, name: str, m: int = 20) -> "DependencyCondition":
        if name not in CONDITION_P:
            raise GraphError(
                f"unknown condition {name!r}; expected one of {sorted(CONDITION_P)}"
            )
        return cls(p=CONDITION_P[name], m=m)


def build_benchmark(domain: str, cond: DependencyCondition) -> TaskGraph:
    """Construct the benchmark graph for a domain under a dependency condition.

    Tasks 1..C form a single chain (task i depends on i-1); tasks C+1..M have
    no dependencies.
    """
    if domain not in BENCHMARKS:
        raise GraphError(f"unknown benchmark {domain!r}; expected one of {BENCHMARKS}")
    labels = _LABELS[domain]
    c = cond.chain_length
    tasks = []
    for i in range(1, cond.m + 1):
        label = labels[(i - 1) % len(labels)]
        deps = frozenset({i - 1}) if 2 <= i <= c else frozenset()
        tasks.append(TaskSpec(id=i, label=label, deps=deps))
    return TaskGraph(tasks=tuple(tasks))


def ready_tasks(graph: TaskGraph, done: set[int], claimed: set[int]) -> set[int]:
    """Ids that are unclaimed, not done, and have all dependencies done."""
    all_ids = set(range(1, graph.m + 1))
    for name, ids in (("done", done), ("claimed", claimed)):
        unknown = set(ids) - all_ids
        if unknown:
            raise GraphError(f"unknown ids in {name}: {sorted(unknown)}")
    return {
        t.id
        for t in graph.tasks
        if t.id not in done and t.id not in claimed and t.deps <= set(done)
    }


def critical_path_length(graph: TaskGraph) -> int:
    """Length in tasks of the longest dependency chain."""
    depth: dict[int, int] = {}
    for t in graph.tasks:  # ids are topologically ordered
        depth[t.id] = 1 + max((depth[d] for d in t.deps), default=0)
    return max(depth.values(), default=0)


def makespan_lower_bound(graph: TaskGraph, n_agents: int) -> int:
    """max(critical path, ceil(M / N)) task-slots for unit tasks."""
    if n_agents < 1:
        raise GraphError(f"n_agents must be >= 1, got {n_agents}")
    return max(critical_path_length(graph), math.ceil(graph.m / n_agents))
