"""Deterministic simulator and analysis toolkit for multi-agent team
coordination: benchmark DAGs, behavior models, a round-synchronous
orchestrator with conflict detection, scalability metrics, and experiment
matrices."""

from .agents import (
    AgentProfile,
    AgentState,
    Claim,
    Complete,
    Edit,
    Idle,
    LatencyModel,
    Message,
    Observation,
    RunTests,
    action_tokens,
    decide,
    sample_latency,
)
from .matrix import ExperimentMatrix, run_matrix, summarize
from .metrics import (
    MetricsReport,
    amdahl_bound,
    efficiency_gap,
    overhead_counts,
    speedup,
    straggler_gap,
    token_multiplier,
)
from .orchestrator import (
    CoordinationScheme,
    RunConfig,
    RunRecord,
    preassign,
    run,
    wall_clock,
)
from .presets import PERSONAS, load_personas
from .stats import (
    StatResult,
    kruskal_wallis,
    mann_whitney_u,
    spearman_rho,
    wilcoxon_signed_rank,
)
from .taskgraph import (
    DependencyCondition,
    TaskGraph,
    TaskSpec,
    build_benchmark,
    critical_path_length,
    makespan_lower_bound,
    ready_tasks,
)
from .workspace import (
    ConflictEvent,
    FileState,
    LockResult,
    Workspace,
    acquire_lock,
    detect_conflicts,
    run_verifier,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
