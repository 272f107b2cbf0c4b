"""Experiment matrices: seeds, execution, persistence, summaries, plots."""
import os

import pytest

from teamsim.matrix import (
    ExperimentMatrix,
    derive_seed,
    final_attempts,
    read_records,
    read_summary,
    run_matrix,
    summarize,
    write_records,
    write_summary,
)
from teamsim.metrics import MetricsReport
from teamsim.plots import emit_plots
from teamsim.presets import PERSONAS

SMALL = ExperimentMatrix(
    benchmarks=("mathutils",),
    conditions=("parallel", "mixed", "serial"),
    schemes=("preassigned",),
    agents=(1, 2, 3, 4, 5),
    personas=("ideal",),
    repetitions=5,
    base_seed=11,
)


@pytest.fixture(scope="module")
def small_records():
    return run_matrix(SMALL, PERSONAS)


class TestSeeds:
    def test_stable_and_distinct(self):
        args = ("mathutils", "mixed", "preassigned", 3, 0)
        assert derive_seed(1, "ideal", *args) == derive_seed(1, "ideal", *args)
        seeds = {
            derive_seed(base, persona, "mathutils", cond, scheme, n, rep, att)
            for base in (0, 1)
            for persona in ("ideal", "heavy-tail")
            for cond in ("parallel", "mixed")
            for scheme in ("preassigned", "decentralized")
            for n in (1, 5)
            for rep in (0, 1)
            for att in (0, 1)
        }
        assert len(seeds) == 2 * 2 * 2 * 2 * 2 * 2 * 2


class TestExecution:
    def test_cell_enumeration(self):
        assert len(list(SMALL.cells())) == 15

    def test_record_count_and_order(self, small_records):
        # Ideal runs never time out, so one attempt per repetition.
        assert len(small_records) == 75
        keys = [
            (r.config["condition"], r.config["n_agents"], r.config["rep"])
            for r in small_records
        ]
        assert keys == [
            (cond, n, rep)
            for cond in ("parallel", "mixed", "serial")
            for n in (1, 2, 3, 4, 5)
            for rep in range(5)
        ]
        assert all(r.success for r in small_records)

    def test_jobs_do_not_change_bytes(self, small_records):
        parallel = run_matrix(SMALL, PERSONAS, jobs=2)
        assert [r.to_json() for r in parallel] \
            == [r.to_json() for r in small_records]

    def test_retry_on_timeout_changes_seed(self):
        matrix = ExperimentMatrix(
            benchmarks=("mathutils",), conditions=("serial",),
            schemes=("decentralized",), agents=(5,), personas=("ideal",),
            repetitions=1, base_seed=0, round_cap=3, retries=2,
        )
        records = run_matrix(matrix, PERSONAS)
        assert len(records) == 3  # all attempts time out at cap 3
        assert not any(r.success for r in records)
        seeds = {r.config["seed"] for r in records}
        assert len(seeds) == 3
        finals = final_attempts(records)
        assert len(finals) == 1
        assert finals[0].config["attempt"] == 2

    def test_rejects_zero_repetitions(self):
        with pytest.raises(ValueError):
            ExperimentMatrix(repetitions=0)


class TestPersistence:
    def test_records_round_trip_bytes(self, small_records, tmp_path):
        path = tmp_path / "records.jsonl"
        write_records(small_records, str(path))
        restored = read_records(str(path))
        assert restored == small_records
        second = tmp_path / "again.jsonl"
        write_records(restored, str(second))
        assert path.read_bytes() == second.read_bytes()

    def test_summary_round_trip(self, small_records, tmp_path):
        reports = summarize(small_records)
        path = tmp_path / "summary.csv"
        write_summary(reports, str(path))
        rows = read_summary(str(path))
        assert len(rows) == len(reports) == 15
        assert list(rows[0]) == MetricsReport.CSV_FIELDS
        by_key = {(r.condition, r.n_agents): r for r in reports}
        for row in rows:
            report = by_key[(row["condition"], int(row["n_agents"]))]
            assert float(row["mean_wall_clock"]) \
                == pytest.approx(report.mean_wall_clock)


class TestSummaries:
    def test_baseline_is_matched_single_agent_cell(self, small_records):
        reports = summarize(small_records)
        for report in reports:
            if report.n_agents == 1:
                assert report.speedup == pytest.approx(1.0)
                assert report.token_multiplier == pytest.approx(1.0)
            else:
                assert report.speedup is not None
                assert report.speedup > 1.0

    def test_speedup_cross_check(self, small_records):
        reports = summarize(small_records)
        by_key = {(r.condition, r.n_agents): r for r in reports}
        for condition in ("parallel", "mixed", "serial"):
            base = by_key[(condition, 1)].mean_wall_clock
            for n in (2, 3, 4, 5):
                report = by_key[(condition, n)]
                assert report.speedup == pytest.approx(
                    base / report.mean_wall_clock)

    def test_missing_baseline_leaves_ratios_unset(self, small_records):
        no_baseline = [r for r in small_records if r.config["n_agents"] != 1]
        reports = summarize(no_baseline)
        assert all(r.speedup is None for r in reports)


class TestPlots:
    def test_figures_are_rendered(self, small_records, tmp_path):
        reports = summarize(small_records)
        emitted, warnings = emit_plots(reports, str(tmp_path))
        names = sorted(os.path.basename(p) for p in emitted)
        assert names == ["conflicts.svg", "overhead.svg", "speedup.svg",
                         "stragglers.svg"]
        assert warnings == []
        for path in emitted:
            with open(path, "rb") as fh:
                assert b"<svg" in fh.read(2048)

    def test_empty_summary_warns_instead_of_raising(self, tmp_path):
        emitted, warnings = emit_plots([], str(tmp_path))
        assert emitted == []
        assert warnings
