"""Run execution: assignment, the synchronous round loop, action application
with dependency enforcement, termination, and RunRecord production.

Each round: (1) snapshot the ledger and build per-agent observations with
previous-round feedback; (2) evaluate every agent's behavior model against
the snapshot and sample its round latency; (3) apply actions in agent-index
order; (4) stop when all tasks are done or the round cap is hit.

Lock discipline differs by scheme: preassigned mode checks the live
within-round lock table (concurrent writes are impossible), decentralized
mode checks the round-start table (always empty, since locks release at
round end), which reproduces the atomic-file-creation races between
concurrently issued calls. Same-round contention of every kind is resolved
in agent-index order.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .agents import (
    AgentProfile,
    AgentState,
    Claim,
    Complete,
    Edit,
    Feedback,
    Idle,
    Message,
    Observation,
    RunTests,
    TaskView,
    action_tokens,
    agent_rng,
    decide,
    sample_latency,
)
from .taskgraph import TaskGraph, critical_path_length
from .workspace import (
    ConflictEvent,
    Workspace,
    acquire_lock,
    detect_conflicts,
    run_verifier,
)


class ConfigError(ValueError):
    """Raised for invalid run configurations."""


@dataclass(frozen=True)
class CoordinationScheme:
    kind: str  # preassigned | decentralized
    reclaim_after: int = 4

    def __post_init__(self):
        if self.kind not in ("preassigned", "decentralized"):
            raise ConfigError(f"unknown scheme {self.kind!r}")
        if self.reclaim_after < 1:
            raise ConfigError("reclaim_after must be >= 1")


@dataclass
class LedgerEntry:
    status: str = "unclaimed"  # unclaimed | claimed | done
    owner: int | None = None
    claim_round: int | None = None
    done_round: int | None = None
    done_seq: int | None = None


@dataclass(frozen=True)
class RunConfig:
    graph: TaskGraph
    scheme: CoordinationScheme
    n_agents: int
    profile: AgentProfile
    seed: int
    round_cap: int = 60
    persona: str = "ideal"
    benchmark: str = "mathutils"
    condition: str = "parallel"

    def __post_init__(self):
        if self.n_agents < 1:
            raise ConfigError("n_agents must be >= 1")
        if self.round_cap < 1:
            raise ConfigError("round_cap must be >= 1")


@dataclass
class RunRecord:
    """Complete, seed-reproducible event log of one run."""

    config: dict
    rounds: list[dict]
    ledger_history: list[dict]
    conflicts: list[ConflictEvent]
    failed_tests_per_round: dict[int, int]
    messages_per_agent: list[int]
    idle_rounds_per_agent: list[int]
    completion_rounds: list[int]
    completion_times: list[float]
    tokens_per_agent: list[int]
    wall_clock_seconds: float
    total_tokens: int
    success: bool
    tasks_completed: int
    rounds_executed: int
    claim_denials: int
    lock_denials: int

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["conflicts"] = [c.__dict__ | {"agents": list(c.agents)} for c in self.conflicts]
        d["failed_tests_per_round"] = {
            str(k): v for k, v in sorted(self.failed_tests_per_round.items())
        }
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        d = dict(d)
        d["conflicts"] = [
            ConflictEvent(
                kind=c["kind"], round=c["round"], task=c["task"],
                agents=tuple(c["agents"]), path=c["path"],
            )
            for c in d["conflicts"]
        ]
        d["failed_tests_per_round"] = {
            int(k): v for k, v in d["failed_tests_per_round"].items()
        }
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        return cls.from_dict(json.loads(text))


def longest_chain(graph: TaskGraph) -> list[int]:
    """Task ids of one maximal dependency chain, in topological order."""
    depth: dict[int, int] = {}
    for t in graph.tasks:
        depth[t.id] = 1 + max((depth[d] for d in t.deps), default=0)
    if not depth:
        return []
    tail = min(t for t, dep in depth.items() if dep == max(depth.values()))
    chain = [tail]
    while depth[chain[-1]] > 1:
        nxt = min(d for d in graph.deps(chain[-1]) if depth[d] == depth[chain[-1]] - 1)
        chain.append(nxt)
    return chain[::-1]


def preassign(graph: TaskGraph, n_agents: int) -> dict[int, list[int]]:
    """Static assignment: the maximal chain goes to agent 0 whole, remaining
    tasks are dealt in id order to the least-loaded agent (ties to the lowest
    index), which keeps the deal balanced against agent 0's chain load. Each
    agent's list comes out in topological (id) order.
    """
    if n_agents < 1:
        raise ConfigError("n_agents must be >= 1")
    chain = longest_chain(graph)
    assignment: dict[int, list[int]] = {a: [] for a in range(n_agents)}
    assignment[0] = list(chain)
    chain_set = set(chain)
    for t in graph.tasks:
        if t.id in chain_set:
            continue
        target = min(range(n_agents), key=lambda a: (len(assignment[a]), a))
        assignment[target].append(t.id)
    for tasks in assignment.values():
        tasks.sort()
    return assignment


def run(config: RunConfig) -> RunRecord:
    """Execute one run and return its complete record."""
    graph = config.graph
    n = config.n_agents
    profile = config.profile
    decentralized = config.scheme.kind == "decentralized"

    ledger = {t.id: LedgerEntry() for t in graph.tasks}
    history: list[dict] = []
    ws = Workspace(graph=graph)
    rngs = [agent_rng(config.seed, i) for i in range(n)]
    states = [AgentState() for _ in range(n)]
    assignment = None if decentralized else preassign(graph, n)
    task_deps = {t.id: t.deps for t in graph.tasks}
    task_paths = {t.id: graph.path_for(t.id) for t in graph.tasks}

    pending_feedback: list[list[Feedback]] = [[] for _ in range(n)]
    round_logs: list[dict] = []
    failed_per_round: dict[int, int] = {}
    messages = [0] * n
    idle_rounds = [0] * n
    completion_rounds = [0] * n
    tokens_per_agent = [0] * n
    latencies_by_round: list[list[float]] = []
    claim_denials = 0
    lock_denials = 0
    success = False
    rounds_executed = 0

    for round_index in range(1, config.round_cap + 1):
        rounds_executed = round_index

        if decentralized:
            _reclaim_stalled(ledger, history, ws, round_index,
                             config.scheme.reclaim_after)

        snapshot = {
            t: TaskView(status=e.status, owner=e.owner, claim_round=e.claim_round)
            for t, e in ledger.items()
        }
        round_lock_table: dict[str, int] = {}

        decisions = []
        latencies = []
        for i in range(n):
            obs = Observation(
                round=round_index,
                snapshot=snapshot,
                assigned=tuple(assignment[i]) if assignment is not None else None,
                feedback=tuple(pending_feedback[i]),
                decentralized=decentralized,
            )
            pending_feedback[i] = []
            actions = decide(profile, states[i], obs, rngs[i], i,
                             task_deps, task_paths)
            decisions.append(actions)
            latencies.append(sample_latency(profile.latency, rngs[i]))
        latencies_by_round.append(latencies)

        agent_logs = []
        edits_this_round: list[tuple[int, str, int]] = []  # (agent, path, task)
        for i in range(n):
            productive = False
            action_logs = []
            for action in decisions[i]:
                if isinstance(action, Claim):
                    entry = ledger[action.task]
                    deps_done = all(
                        ledger[d].status == "done" for d in task_deps[action.task]
                    )
                    if entry.status == "unclaimed" and deps_done:
                        entry.status = "claimed"
                        entry.owner = i
                        entry.claim_round = round_index
                        history.append({
                            "seq": ws.next_seq(), "round": round_index,
                            "event": "claim", "task": action.task, "agent": i,
                        })
                        productive = True
                        action_logs.append({"type": "claim", "task": action.task,
                                            "outcome": "granted"})
                    else:
                        claim_denials += 1
                        pending_feedback[i].append(
                            Feedback(kind="claim_denied", task=action.task,
                                     holder=entry.owner)
                        )
                        action_logs.append({"type": "claim", "task": action.task,
                                            "outcome": "denied"})
                elif isinstance(action, Edit):
                    if decentralized:
                        # Stale-lock window: checked against the round-start
                        # table, which is empty because locks release at round
                        # end -- concurrently issued edits all believe they
                        # hold a fresh lock.
                        granted = True
                        round_lock_table.setdefault(action.path, i)
                    else:
                        result = acquire_lock(round_lock_table, action.path, i)
                        granted = result.granted
                    if granted:
                        state = ws.apply_edit(i, action, round_index)
                        owned = ledger[action.task].owner == i
                        if owned:
                            productive = True
                        edits_this_round.append((i, action.path, action.task))
                        action_logs.append({
                            "type": "edit", "task": action.task,
                            "path": action.path, "correct": action.correct,
                            "version": state.version, "outcome": "applied",
                            "owned": owned,
                        })
                    else:
                        lock_denials += 1
                        pending_feedback[i].append(
                            Feedback(kind="lock_denied", task=action.task,
                                     holder=result.holder)
                        )
                        action_logs.append({"type": "edit", "task": action.task,
                                            "path": action.path,
                                            "outcome": "lock_denied"})
                elif isinstance(action, RunTests):
                    count, failing = run_verifier(ws, graph)
                    failed_per_round[round_index] = (
                        failed_per_round.get(round_index, 0) + count
                    )
                    pending_feedback[i].append(
                        Feedback(kind="tests", failed=count)
                    )
                    action_logs.append({"type": "run_tests", "failed": count,
                                        "failing": failing})
                elif isinstance(action, Complete):
                    entry = ledger[action.task]
                    if entry.status == "claimed" and entry.owner == i:
                        entry.status = "done"
                        entry.done_round = round_index
                        entry.done_seq = ws.next_seq()
                        history.append({
                            "seq": entry.done_seq, "round": round_index,
                            "event": "done", "task": action.task, "agent": i,
                        })
                        productive = True
                        completion_rounds[i] = round_index
                        action_logs.append({"type": "complete",
                                            "task": action.task,
                                            "outcome": "done"})
                    else:
                        pending_feedback[i].append(
                            Feedback(kind="complete_denied", task=action.task)
                        )
                        action_logs.append({"type": "complete",
                                            "task": action.task,
                                            "outcome": "rejected"})
                elif isinstance(action, Message):
                    messages[i] += 1
                    action_logs.append({"type": "message",
                                        "tokens": action.tokens})
                else:
                    action_logs.append({"type": "idle"})
            tokens = action_tokens(profile, decisions[i])
            tokens_per_agent[i] += tokens
            if not productive:
                idle_rounds[i] += 1
            agent_logs.append({
                "actions": action_logs,
                "latency": latencies[i],
                "tokens": tokens,
                "idle": not productive,
            })

        # Clobber feedback: an owner whose fresh edit was overwritten later in
        # the same round learns of it via its next-round self-check.
        for i, path, task in edits_this_round:
            if ledger[task].owner == i and ledger[task].status == "claimed" \
                    and ws.files[path].author != i:
                if not any(f.kind == "clobbered" and f.task == task
                           for f in pending_feedback[i]):
                    pending_feedback[i].append(
                        Feedback(kind="clobbered", task=task)
                    )

        round_logs.append({"round": round_index, "agents": agent_logs})

        if all(e.status == "done" for e in ledger.values()):
            success = True
            break

    done_seq = {t: e.done_seq for t, e in ledger.items()}
    conflicts = detect_conflicts(ws.write_log, graph, done_seq)
    wall_clock = sum(max(lat) for lat in latencies_by_round)

    if decentralized:
        # Agents stay available for reassignment until the team finishes.
        completion_rounds = [rounds_executed] * n
    completion_times = [
        sum(latencies_by_round[r][i] for r in range(completion_rounds[i]))
        for i in range(n)
    ]

    return RunRecord(
        config={
            "benchmark": config.benchmark,
            "condition": config.condition,
            "scheme": config.scheme.kind,
            "reclaim_after": config.scheme.reclaim_after,
            "n_agents": n,
            "persona": config.persona,
            "seed": config.seed,
            "round_cap": config.round_cap,
            "m": graph.m,
            "chain_length": critical_path_length(graph),
        },
        rounds=round_logs,
        ledger_history=history,
        conflicts=conflicts,
        failed_tests_per_round=failed_per_round,
        messages_per_agent=messages,
        idle_rounds_per_agent=idle_rounds,
        completion_rounds=completion_rounds,
        completion_times=completion_times,
        tokens_per_agent=tokens_per_agent,
        wall_clock_seconds=wall_clock,
        total_tokens=sum(tokens_per_agent),
        success=success,
        tasks_completed=sum(1 for e in ledger.values() if e.status == "done"),
        rounds_executed=rounds_executed,
        claim_denials=claim_denials,
        lock_denials=lock_denials,
    )


def _reclaim_stalled(ledger, history, ws, round_index, reclaim_after):
    """Revert tasks claimed but not done for reclaim_after rounds."""
    for task, entry in sorted(ledger.items()):
        if (
            entry.status == "claimed"
            and entry.claim_round is not None
            and round_index - entry.claim_round >= reclaim_after
        ):
            entry.status = "unclaimed"
            entry.owner = None
            entry.claim_round = None
            history.append({
                "seq": ws.next_seq(), "round": round_index,
                "event": "reclaim", "task": task, "agent": None,
            })


def wall_clock(record: RunRecord) -> float:
    """Sum over executed rounds of the max per-agent latency (barrier model)."""
    return sum(
        max(a["latency"] for a in r["agents"]) for r in record.rounds
    )
