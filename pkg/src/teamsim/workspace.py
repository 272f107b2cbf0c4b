"""Shared repository state: files, pessimistic locks, write history, the
test verifier, and detection of the three consistency-conflict types
(concurrent writes, rewrites, temporal violations).

File content is abstracted to (implementing task, correctness): the verifier
passes task k iff its file is present, correct, implements k, and every
transitive dependency's file is present and correct (chain functions import
and delegate to their predecessors).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .agents import Edit
from .taskgraph import TaskGraph


class WorkspaceError(ValueError):
    """Raised for edits that violate the benchmark's task-to-path map."""


@dataclass
class FileState:
    path: str
    implementing_task: int
    author: int
    written_round: int
    correct: bool
    version: int


@dataclass(frozen=True)
class WriteEvent:
    """One applied edit, in global application order."""

    seq: int
    round: int
    agent: int
    path: str
    task: int
    correct: bool
    version: int


@dataclass(frozen=True)
class ConflictEvent:
    kind: str  # ConcurrentWrite | Rewrite | TemporalViolation
    round: int
    task: int
    agents: tuple[int, ...]
    path: str

    def __post_init__(self):
        if self.kind == "ConcurrentWrite" and len(set(self.agents)) < 2:
            raise ValueError("ConcurrentWrite requires >= 2 distinct agents")
        if self.kind == "Rewrite" and len(set(self.agents)) != 2:
            raise ValueError("Rewrite requires exactly 2 distinct agents")


@dataclass(frozen=True)
class LockResult:
    granted: bool
    holder: int | None = None


def acquire_lock(table: dict[str, int], path: str, agent: int) -> LockResult:
    """Grant iff the path is unheld or held by the same agent.

    Denial is a value carrying the current holder, returned to the agent as
    feedback; it is never an error.
    """
    holder = table.get(path)
    if holder is None or holder == agent:
        table[path] = agent
        return LockResult(granted=True, holder=agent)
    return LockResult(granted=False, holder=holder)


@dataclass
class Workspace:
    """Mutable repository state for one run. Mutated only by the orchestrator."""

    graph: TaskGraph
    files: dict[str, FileState] = field(default_factory=dict)
    write_log: list[WriteEvent] = field(default_factory=list)
    _seq: int = 0

    def next_seq(self) -> int:
        self._seq += 1
        return self._seq

    def apply_edit(self, agent: int, edit: Edit, round_index: int) -> FileState:
        """Apply a granted edit: replace the file and append to the write log."""
        expected = self.graph.path_for(edit.task)
        if edit.path != expected:
            raise WorkspaceError(
                f"edit path {edit.path!r} does not implement task {edit.task} "
                f"(expected {expected!r})"
            )
        prev = self.files.get(edit.path)
        version = 1 if prev is None else prev.version + 1
        state = FileState(
            path=edit.path,
            implementing_task=edit.task,
            author=agent,
            written_round=round_index,
            correct=edit.correct,
            version=version,
        )
        self.files[edit.path] = state
        self.write_log.append(
            WriteEvent(
                seq=self.next_seq(),
                round=round_index,
                agent=agent,
                path=edit.path,
                task=edit.task,
                correct=edit.correct,
                version=version,
            )
        )
        return state


def run_verifier(ws: Workspace, graph: TaskGraph) -> tuple[int, list[int]]:
    """Deterministic stand-in for the benchmark test suite.

    Returns (failure count, failing task ids) over tasks whose files exist;
    tasks with no file have no tests to fail.
    """

    def file_ok(task_id: int) -> bool:
        f = ws.files.get(graph.path_for(task_id))
        return f is not None and f.correct and f.implementing_task == task_id

    failing = []
    for t in graph.tasks:
        if graph.path_for(t.id) not in ws.files:
            continue
        ok = file_ok(t.id) and all(file_ok(d) for d in graph.ancestors(t.id))
        if not ok:
            failing.append(t.id)
    return len(failing), failing


def detect_conflicts(
    write_log: list[WriteEvent],
    graph: TaskGraph,
    done_seq: dict[int, int | None],
) -> list[ConflictEvent]:
    """Scan a complete run's write log for the three conflict kinds.

    done_seq maps task id to the global sequence number at which the ledger
    marked it done (None if never done); it orders writes against dependency
    completion for temporal violations.
    """
    conflicts: list[ConflictEvent] = []

    # ConcurrentWrite: >= 2 distinct agents wrote one path in the same round.
    by_round_path: dict[tuple[int, str], list[WriteEvent]] = {}
    for w in write_log:
        by_round_path.setdefault((w.round, w.path), []).append(w)
    for (round_index, path), events in sorted(by_round_path.items()):
        agents = sorted({w.agent for w in events})
        if len(agents) >= 2:
            conflicts.append(
                ConflictEvent(
                    kind="ConcurrentWrite",
                    round=round_index,
                    task=events[0].task,
                    agents=tuple(agents),
                    path=path,
                )
            )

    # Rewrite: a later-round write over a different author's previous version.
    last_by_path: dict[str, WriteEvent] = {}
    for w in sorted(write_log, key=lambda w: w.seq):
        prev = last_by_path.get(w.path)
        if prev is not None and prev.agent != w.agent and prev.round < w.round:
            conflicts.append(
                ConflictEvent(
                    kind="Rewrite",
                    round=w.round,
                    task=w.task,
                    agents=(prev.agent, w.agent),
                    path=w.path,
                )
            )
        last_by_path[w.path] = w

    # TemporalViolation: an edit applied before every dependency was done.
    for w in sorted(write_log, key=lambda w: w.seq):
        for dep in graph.deps(w.task):
            dep_done = done_seq.get(dep)
            if dep_done is None or dep_done > w.seq:
                conflicts.append(
                    ConflictEvent(
                        kind="TemporalViolation",
                        round=w.round,
                        task=w.task,
                        agents=(w.agent,),
                        path=w.path,
                    )
                )
                break

    conflicts.sort(key=lambda c: (c.round, c.kind, c.task, c.agents))
    return conflicts
