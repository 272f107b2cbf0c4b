"""Agent behavior models: the action vocabulary plus pluggable behavior,
latency, token-cost, and misreporting parameters that stand in for real
LLM agents.

A behavior model is a pure function of (profile, local state, observation,
rng). Each agent owns an independent RNG substream derived from the run seed
and its index, so decisions are bit-reproducible regardless of evaluation
order.
"""
from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field, replace


# --- actions -------------------------------------------------------------

@dataclass(frozen=True)
class Claim:
    task: int


@dataclass(frozen=True)
class Edit:
    path: str
    task: int
    correct: bool


@dataclass(frozen=True)
class RunTests:
    pass


@dataclass(frozen=True)
class Complete:
    task: int


@dataclass(frozen=True)
class Message:
    tokens: int

    def __post_init__(self):
        if self.tokens < 1:
            raise ValueError(f"message token count must be >= 1, got {self.tokens}")


@dataclass(frozen=True)
class Idle:
    pass


AgentAction = Claim | Edit | RunTests | Complete | Message | Idle


# --- latency -------------------------------------------------------------

@dataclass(frozen=True)
class LatencyModel:
    """Per-round agent latency distribution.

    kind is one of:
      constant   -- always `location` seconds
      lognormal  -- exp(Normal(location, scale)); scale=0 degenerates to
                    exp(location)
      heavytail  -- a base model plus, with probability spike_prob, an
                    additive spike of spike_magnitude (scaled by a Pareto
                    draw when spike_alpha > 0)
    """

    kind: str = "constant"
    location: float = 2.0
    scale: float = 0.0
    base: "LatencyModel | None" = None
    spike_prob: float = 0.0
    spike_magnitude: float = 0.0
    spike_alpha: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "lognormal", "heavytail"):
            raise ValueError(f"unknown latency kind {self.kind!r}")
        if self.kind == "constant" and self.location <= 0:
            raise ValueError("constant latency must be positive")
        if self.kind == "heavytail" and self.base is None:
            raise ValueError("heavytail latency requires a base model")
        if not 0.0 <= self.spike_prob <= 1.0:
            raise ValueError("spike probability must be in [0, 1]")


def sample_latency(model: LatencyModel, rng: random.Random) -> float:
    """Draw one positive round latency from the model."""
    if model.kind == "constant":
        return model.location
    if model.kind == "lognormal":
        if model.scale == 0.0:
            return math.exp(model.location)
        return rng.lognormvariate(model.location, model.scale)
    # heavytail
    value = sample_latency(model.base, rng)
    if rng.random() < model.spike_prob:
        spike = model.spike_magnitude
        if model.spike_alpha > 0:
            spike *= rng.paretovariate(model.spike_alpha)
        value += spike
    return value


# --- profile and observation --------------------------------------------

BEHAVIOR_KINDS = ("ideal", "greedy-claimer", "chatty-idler", "misreporter")


@dataclass(frozen=True)
class AgentProfile:
    """Behavior kind plus the stochastic knobs replacing LLM generation."""

    kind: str = "ideal"
    latency: LatencyModel = field(default_factory=LatencyModel)
    chattiness: float = 0.0
    misreport_prob: float = 0.0
    reclaim_patience: int = 4  # rounds before a greedy agent re-implements a stalled task
    run_tests_on_complete: bool = False
    tokens_per_edit: int = 250
    tokens_per_message: int = 40
    tokens_per_observation: int = 150
    tokens_per_action: int = 10

    def __post_init__(self):
        if self.kind not in BEHAVIOR_KINDS:
            raise ValueError(f"unknown behavior kind {self.kind!r}")
        for name in ("chattiness", "misreport_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        for name in ("tokens_per_edit", "tokens_per_message",
                     "tokens_per_observation", "tokens_per_action"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.reclaim_patience < 1:
            raise ValueError("reclaim_patience must be >= 1")


@dataclass(frozen=True)
class TaskView:
    """One row of the ledger snapshot an agent observes."""

    status: str  # unclaimed | claimed | done
    owner: int | None = None
    claim_round: int | None = None


@dataclass(frozen=True)
class Feedback:
    """One item of previous-round feedback delivered with the observation."""

    kind: str  # claim_denied | lock_denied | complete_denied | clobbered | tests
    task: int | None = None
    holder: int | None = None
    failed: int = 0


@dataclass(frozen=True)
class Observation:
    """Round-start snapshot injected into an agent.

    The snapshot is the ledger state at round start; it is stale within the
    round, which is the mechanism that produces claim collisions.
    """

    round: int
    snapshot: dict[int, TaskView]
    assigned: tuple[int, ...] | None  # preassign mode only
    feedback: tuple[Feedback, ...] = ()
    decentralized: bool = False


@dataclass
class AgentState:
    """Agent-local memory carried between rounds."""

    pending: int | None = None  # task claimed+edited last round, to complete next


def agent_rng(run_seed: int, agent_index: int) -> random.Random:
    """Independent deterministic RNG substream for one agent of a run."""
    digest = hashlib.sha256(f"{run_seed}|agent|{agent_index}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


# --- behavior ------------------------------------------------------------

def _path_for(obs_paths: dict[int, str], task: int) -> str:
    return obs_paths[task]


def _snapshot_ready(obs: Observation, task_deps: dict[int, frozenset[int]],
                    task: int) -> bool:
    return all(obs.snapshot[d].status == "done" for d in task_deps[task])


def _idle_or_message(profile: AgentProfile, rng: random.Random) -> list[AgentAction]:
    if profile.chattiness > 0 and rng.random() < profile.chattiness:
        return [Message(tokens=profile.tokens_per_message)]
    return [Idle()]


def decide(
    profile: AgentProfile,
    state: AgentState,
    obs: Observation,
    rng: random.Random,
    agent_index: int,
    task_deps: dict[int, frozenset[int]],
    task_paths: dict[int, str],
) -> list[AgentAction]:
    """Emit this round's action list for one agent.

    Behavior follows a two-round task lifecycle: claim+edit in one round,
    then complete the next round. In decentralized mode a clobbered edit
    (detected via feedback) is redone before completing, and claims may be
    accompanied by a status message announcing the claim.
    """
    denied = {f.task for f in obs.feedback if f.kind == "claim_denied"}
    clobbered = {f.task for f in obs.feedback if f.kind == "clobbered"}

    # Resolve last round's claim+edit phase.
    if state.pending is not None:
        task = state.pending
        view = obs.snapshot.get(task)
        if task in denied or view is None or view.owner != agent_index:
            # Lost the claim race (or the task was reclaimed); move on.
            state.pending = None
        elif view.status == "done":
            state.pending = None
        elif task in clobbered:
            # Self-check found the file overwritten by a teammate: redo it.
            correct = rng.random() >= profile.misreport_prob
            return [Edit(path=task_paths[task], task=task, correct=correct)]
        else:
            state.pending = None
            actions: list[AgentAction] = []
            if profile.run_tests_on_complete:
                actions.append(RunTests())
            actions.append(Complete(task=task))
            return actions

    # Pick a new task.
    task = _select_task(profile, obs, rng, agent_index, task_deps)
    if task is not None:
        correct = rng.random() >= profile.misreport_prob
        state.pending = task
        actions = [
            Claim(task=task),
            Edit(path=task_paths[task], task=task, correct=correct),
        ]
        if obs.decentralized and profile.chattiness > 0 \
                and rng.random() < profile.chattiness:
            # Claim announcement: decentralized coordination chatter.
            actions.insert(0, Message(tokens=profile.tokens_per_message))
        return actions

    if profile.kind == "greedy-claimer":
        stalled = _stalled_tasks(profile, obs, task_deps)
        if stalled:
            task = stalled[rng.randrange(len(stalled))]
            correct = rng.random() >= profile.misreport_prob
            return [Edit(path=task_paths[task], task=task, correct=correct)]

    return _idle_or_message(profile, rng)


def _select_task(
    profile: AgentProfile,
    obs: Observation,
    rng: random.Random,
    agent_index: int,
    task_deps: dict[int, frozenset[int]],
) -> int | None:
    candidates = [
        t for t, view in sorted(obs.snapshot.items())
        if view.status == "unclaimed" and _snapshot_ready(obs, task_deps, t)
    ]
    if obs.assigned is not None:
        # Preassigned mode: only tasks from the agent's own list.
        own = set(obs.assigned)
        candidates = [t for t in candidates if t in own]
    if not candidates:
        return None
    if profile.kind == "greedy-claimer":
        return candidates[rng.randrange(len(candidates))]
    return candidates[0]


def _stalled_tasks(
    profile: AgentProfile,
    obs: Observation,
    task_deps: dict[int, frozenset[int]],
) -> list[int]:
    """Tasks claimed but idle long enough for a greedy agent to re-implement."""
    out = []
    for t, view in sorted(obs.snapshot.items()):
        if (
            view.status == "claimed"
            and view.claim_round is not None
            and obs.round - view.claim_round >= profile.reclaim_patience
            and _snapshot_ready(obs, task_deps, t)
        ):
            out.append(t)
    return out


def action_tokens(profile: AgentProfile, actions: list[AgentAction],
                  obs: Observation | None = None) -> int:
    """Simulated token cost of one agent-round: observation plus per-action."""
    total = profile.tokens_per_observation
    for action in actions:
        if isinstance(action, Edit):
            total += profile.tokens_per_edit
        elif isinstance(action, Message):
            total += action.tokens
        else:
            total += profile.tokens_per_action
    return total
