"""Task graph construction, readiness, and makespan bounds."""
import pytest

from teamsim.taskgraph import (
    BENCHMARKS,
    CONDITION_P,
    DependencyCondition,
    GraphError,
    TaskGraph,
    TaskSpec,
    build_benchmark,
    critical_path_length,
    makespan_lower_bound,
    ready_tasks,
)


def graph_for(condition: str) -> TaskGraph:
    return build_benchmark("mathutils", DependencyCondition.named(condition))


class TestDependencyCondition:
    @pytest.mark.parametrize("name,p,chain", [
        ("parallel", 0.9, 2),
        ("mixed", 0.5, 10),
        ("serial", 0.2, 16),
    ])
    def test_named_conditions(self, name, p, chain):
        cond = DependencyCondition.named(name)
        assert cond.p == p
        assert cond.m == 20
        assert cond.chain_length == chain

    def test_chain_length_rounds_half_up(self):
        assert DependencyCondition(p=0.5, m=5).chain_length == 3
        assert DependencyCondition(p=1.0, m=20).chain_length == 1

    def test_rejects_bad_fraction(self):
        with pytest.raises(GraphError):
            DependencyCondition(p=1.5)
        with pytest.raises(GraphError):
            DependencyCondition(p=-0.1)

    def test_rejects_unknown_name(self):
        with pytest.raises(GraphError, match="unknown condition"):
            DependencyCondition.named("sideways")


class TestTaskSpec:
    def test_rejects_bad_id(self):
        with pytest.raises(GraphError):
            TaskSpec(id=0, label="x")

    def test_rejects_forward_or_self_deps(self):
        with pytest.raises(GraphError):
            TaskSpec(id=3, label="x", deps=frozenset({3}))
        with pytest.raises(GraphError):
            TaskSpec(id=3, label="x", deps=frozenset({5}))

    def test_rejects_nonpositive_work(self):
        with pytest.raises(GraphError):
            TaskSpec(id=1, label="x", work=0)


class TestTaskGraph:
    def test_ids_must_be_contiguous_from_one(self):
        with pytest.raises(GraphError):
            TaskGraph(tasks=(TaskSpec(id=2, label="x"),))

    def test_task_lookup_bounds(self):
        g = graph_for("parallel")
        with pytest.raises(GraphError):
            g.task(0)
        with pytest.raises(GraphError):
            g.task(21)

    def test_path_round_trip(self):
        g = graph_for("mixed")
        for t in g.tasks:
            assert g.task_for_path(g.path_for(t.id)) == t.id
        assert g.path_for(1) == "task_01_add.py"
        with pytest.raises(GraphError):
            g.task_for_path("task_99_nope.py")

    def test_json_round_trip(self):
        g = graph_for("serial")
        assert TaskGraph.from_json(g.to_json()) == g

    def test_from_json_rejects_garbage(self):
        with pytest.raises(GraphError):
            TaskGraph.from_json("not json")
        with pytest.raises(GraphError):
            TaskGraph.from_json('{"id": 1}')

    def test_ancestors_are_transitive(self):
        g = graph_for("serial")
        assert g.ancestors(16) == frozenset(range(1, 16))
        assert g.ancestors(17) == frozenset()


class TestBuildBenchmark:
    @pytest.mark.parametrize("domain", BENCHMARKS)
    @pytest.mark.parametrize("condition", sorted(CONDITION_P))
    def test_structure(self, domain, condition):
        cond = DependencyCondition.named(condition)
        g = build_benchmark(domain, cond)
        c = cond.chain_length
        assert g.m == 20
        assert g.deps(1) == frozenset()
        for i in range(2, c + 1):
            assert g.deps(i) == frozenset({i - 1})
        for i in range(c + 1, 21):
            assert g.deps(i) == frozenset()

    def test_domains_differ_only_in_labels(self):
        cond = DependencyCondition.named("mixed")
        graphs = [build_benchmark(d, cond) for d in BENCHMARKS]
        deps = [{t.id: t.deps for t in g.tasks} for g in graphs]
        assert deps[0] == deps[1] == deps[2]
        labels = [tuple(t.label for t in g.tasks) for g in graphs]
        assert len(set(labels)) == 3

    def test_rejects_unknown_domain(self):
        with pytest.raises(GraphError, match="unknown benchmark"):
            build_benchmark("webscraping", DependencyCondition.named("mixed"))


class TestReadyTasks:
    def test_initial_ready_set(self):
        g = graph_for("mixed")  # chain 1..10, free 11..20
        ready = ready_tasks(g, done=set(), claimed=set())
        assert ready == {1} | set(range(11, 21))

    def test_chain_unlocks_one_at_a_time(self):
        g = graph_for("serial")
        assert 2 not in ready_tasks(g, done=set(), claimed=set())
        assert 2 in ready_tasks(g, done={1}, claimed=set())
        assert 3 not in ready_tasks(g, done={1}, claimed=set())

    def test_claimed_and_done_are_excluded(self):
        g = graph_for("parallel")
        ready = ready_tasks(g, done={3}, claimed={4, 5})
        assert not {3, 4, 5} & ready

    def test_rejects_unknown_ids(self):
        g = graph_for("parallel")
        with pytest.raises(GraphError):
            ready_tasks(g, done={42}, claimed=set())


class TestBounds:
    @pytest.mark.parametrize("condition,cpl", [
        ("parallel", 2), ("mixed", 10), ("serial", 16),
    ])
    def test_critical_path_equals_chain(self, condition, cpl):
        assert critical_path_length(graph_for(condition)) == cpl

    def test_lower_bound_examples(self):
        assert makespan_lower_bound(graph_for("parallel"), 5) == 4
        assert makespan_lower_bound(graph_for("parallel"), 1) == 20
        assert makespan_lower_bound(graph_for("serial"), 2) == 16

    def test_lower_bound_rejects_bad_team(self):
        with pytest.raises(GraphError):
            makespan_lower_bound(graph_for("mixed"), 0)
