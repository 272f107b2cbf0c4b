"""Assignment, the round loop, termination, and run records."""
import pytest

from teamsim.orchestrator import (
    ConfigError,
    CoordinationScheme,
    LedgerEntry,
    RunConfig,
    RunRecord,
    _reclaim_stalled,
    longest_chain,
    preassign,
    run,
    wall_clock,
)
from teamsim.presets import PERSONAS
from teamsim.taskgraph import (
    DependencyCondition,
    build_benchmark,
    makespan_lower_bound,
)
from teamsim.workspace import Workspace

from oracles import list_schedule_rounds


def graph_for(condition):
    return build_benchmark("mathutils", DependencyCondition.named(condition))


def make_run(condition="parallel", scheme="preassigned", n=1, persona="ideal",
             seed=0, round_cap=120, reclaim_after=4):
    graph = graph_for(condition)
    config = RunConfig(
        graph=graph,
        scheme=CoordinationScheme(kind=scheme, reclaim_after=reclaim_after),
        n_agents=n,
        profile=PERSONAS[persona],
        seed=seed,
        round_cap=round_cap,
        persona=persona,
        benchmark="mathutils",
        condition=condition,
    )
    return run(config)


class TestValidation:
    def test_rejects_unknown_scheme(self):
        with pytest.raises(ConfigError):
            CoordinationScheme(kind="anarchic")

    def test_rejects_bad_reclaim(self):
        with pytest.raises(ConfigError):
            CoordinationScheme(kind="decentralized", reclaim_after=0)

    def test_rejects_bad_team_and_cap(self):
        g = graph_for("parallel")
        scheme = CoordinationScheme(kind="preassigned")
        with pytest.raises(ConfigError):
            RunConfig(graph=g, scheme=scheme, n_agents=0,
                      profile=PERSONAS["ideal"], seed=0)
        with pytest.raises(ConfigError):
            RunConfig(graph=g, scheme=scheme, n_agents=1,
                      profile=PERSONAS["ideal"], seed=0, round_cap=0)


class TestPreassign:
    def test_parallel_five_agents_deal(self):
        assignment = preassign(graph_for("parallel"), 5)
        assert assignment == {
            0: [1, 2, 11, 16],
            1: [3, 7, 12, 17],
            2: [4, 8, 13, 18],
            3: [5, 9, 14, 19],
            4: [6, 10, 15, 20],
        }

    def test_chain_goes_whole_to_agent_zero(self):
        for condition, chain in (("mixed", 10), ("serial", 16)):
            assignment = preassign(graph_for(condition), 4)
            assert assignment[0][:chain] == list(range(1, chain + 1))

    def test_single_agent_gets_everything(self):
        assignment = preassign(graph_for("serial"), 1)
        assert assignment == {0: list(range(1, 21))}

    def test_deal_is_balanced(self):
        for condition in ("parallel", "mixed", "serial"):
            for n in range(1, 6):
                assignment = preassign(graph_for(condition), n)
                assert sorted(t for ts in assignment.values() for t in ts) \
                    == list(range(1, 21))
                free = [len(ts) for a, ts in assignment.items() if a != 0]
                if free:
                    assert max(free) - min(free) <= 1

    def test_longest_chain_serial(self):
        assert longest_chain(graph_for("serial")) == list(range(1, 17))


class TestIdealRuns:
    def test_single_agent_baseline(self):
        record = make_run(n=1)
        assert record.success
        assert record.rounds_executed == 40  # 20 tasks x 2 rounds
        assert record.wall_clock_seconds == pytest.approx(80.0)
        assert record.idle_rounds_per_agent == [0]
        assert record.tasks_completed == 20
        assert record.conflicts == []
        assert record.claim_denials == 0
        assert record.lock_denials == 0

    def test_parallel_five_agents_is_five_times_faster(self):
        record = make_run(n=5)
        assert record.success
        assert record.rounds_executed == 8
        assert record.wall_clock_seconds == pytest.approx(16.0)

    @pytest.mark.parametrize("condition", ["parallel", "mixed", "serial"])
    @pytest.mark.parametrize("n", range(1, 6))
    def test_rounds_match_independent_scheduler(self, condition, n):
        graph = graph_for(condition)
        record = make_run(condition=condition, n=n)
        oracle = list_schedule_rounds(
            preassign(graph, n), {t.id: t.deps for t in graph.tasks})
        assert record.rounds_executed == oracle
        assert record.rounds_executed >= makespan_lower_bound(graph, n)

    def test_wall_clock_matches_round_maxima(self):
        record = make_run(condition="mixed", n=3, persona="heavy-tail")
        assert wall_clock(record) == pytest.approx(record.wall_clock_seconds)


class TestDecentralizedRuns:
    @pytest.mark.parametrize("condition", ["parallel", "mixed", "serial"])
    @pytest.mark.parametrize("persona", sorted(PERSONAS))
    def test_terminates_within_cap(self, condition, persona):
        record = make_run(condition=condition, scheme="decentralized", n=5,
                          persona=persona, round_cap=120)
        assert record.success
        assert record.tasks_completed == 20

    def test_agents_stay_until_team_finishes(self):
        record = make_run(condition="mixed", scheme="decentralized", n=4)
        assert record.completion_rounds == [record.rounds_executed] * 4

    def test_slower_than_preassigned(self):
        for condition in ("parallel", "mixed", "serial"):
            pre = make_run(condition=condition, n=5)
            dec = make_run(condition=condition, scheme="decentralized", n=5)
            assert dec.rounds_executed > pre.rounds_executed

    def test_round_cap_timeout_is_reported_not_raised(self):
        record = make_run(condition="serial", scheme="decentralized", n=5,
                          round_cap=5)
        assert not record.success
        assert record.rounds_executed == 5
        assert record.tasks_completed < 20


class TestReclaim:
    def test_stalled_claim_reverts(self):
        ledger = {1: LedgerEntry(status="claimed", owner=2, claim_round=1),
                  2: LedgerEntry(status="claimed", owner=0, claim_round=4),
                  3: LedgerEntry(status="done", owner=1, claim_round=1)}
        history: list[dict] = []
        ws = Workspace(graph=graph_for("parallel"))
        _reclaim_stalled(ledger, history, ws, round_index=5, reclaim_after=4)
        assert ledger[1].status == "unclaimed"
        assert ledger[1].owner is None
        assert ledger[2].status == "claimed"  # only 1 round old
        assert ledger[3].status == "done"
        assert [h["event"] for h in history] == ["reclaim"]

    def test_reclaimed_tasks_still_finish(self):
        record = make_run(condition="serial", scheme="decentralized", n=5,
                          persona="greedy-claimer", reclaim_after=3)
        assert record.success
        reclaims = [h for h in record.ledger_history
                    if h["event"] == "reclaim"]
        done = {h["task"] for h in record.ledger_history
                if h["event"] == "done"}
        assert done == set(range(1, 21))
        assert isinstance(reclaims, list)


class TestRecords:
    def test_same_seed_same_bytes(self):
        for persona in ("ideal", "heavy-tail", "greedy-claimer"):
            a = make_run(condition="mixed", scheme="decentralized", n=4,
                         persona=persona, seed=9)
            b = make_run(condition="mixed", scheme="decentralized", n=4,
                         persona=persona, seed=9)
            assert a.to_json() == b.to_json()

    def test_different_seeds_differ(self):
        a = make_run(condition="mixed", scheme="decentralized", n=4,
                     persona="heavy-tail", seed=1)
        b = make_run(condition="mixed", scheme="decentralized", n=4,
                     persona="heavy-tail", seed=2)
        assert a.to_json() != b.to_json()

    def test_json_round_trip(self):
        record = make_run(condition="mixed", scheme="decentralized", n=3,
                          persona="greedy-claimer")
        assert record.conflicts  # exercise conflict serialization
        restored = RunRecord.from_json(record.to_json())
        assert restored == record
        assert restored.to_json() == record.to_json()

    def test_token_accounting_is_consistent(self):
        record = make_run(condition="mixed", n=3, persona="chatty-idler",
                          scheme="decentralized")
        assert record.total_tokens == sum(record.tokens_per_agent)
        per_agent = [0] * 3
        for r in record.rounds:
            for i, a in enumerate(r["agents"]):
                per_agent[i] += a["tokens"]
        assert per_agent == record.tokens_per_agent
