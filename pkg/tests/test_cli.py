"""CLI tests: config/flag precedence, outputs, exit codes, determinism."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from medgossip.cli import main

SMALL_WORKLOAD = """
# four messages, one per type
count_patient_data = 1
count_diagnosis = 1
count_treatment_plan = 1
count_emergency_alert = 1
"""


@pytest.fixture
def runner():
    return CliRunner()


def write_config(tmp_path: Path, text: str) -> str:
    path = tmp_path / "run.cfg"
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestRunCommand:
    def test_run_writes_outputs_and_summary(self, runner, tmp_path):
        result = runner.invoke(
            main, ["run", "--seed", "42", "--out", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output
        assert "Message Type" in result.output
        assert "Total" in result.output
        assert "100%" in result.output
        document = json.loads((tmp_path / "metrics.json").read_text())
        assert document["metrics"]["totals"]["accepted"] == 100
        table1 = (tmp_path / "table1.csv").read_text().splitlines()
        assert table1[0] == "Message Type,Total,Accepted,Accuracy"
        assert "Patient Data,25,25,100%" in table1
        assert "Total,100,100,100%" in table1
        assert (tmp_path / "table2.csv").exists()

    def test_missing_seed_exits_2(self, runner, tmp_path):
        result = runner.invoke(main, ["run", "--out", str(tmp_path)])
        assert result.exit_code == 2
        assert "seed" in result.output

    def test_quorum_violation_exits_2_and_cites_rule(self, runner, tmp_path):
        result = runner.invoke(
            main, ["run", "--seed", "1", "--n", "4", "--f", "2", "--out", str(tmp_path)]
        )
        assert result.exit_code == 2
        assert "3f + 1" in result.output

    def test_config_file_drives_run(self, runner, tmp_path):
        cfg = write_config(tmp_path, "seed = 42\nn = 4\nf = 1\n" + SMALL_WORKLOAD)
        result = runner.invoke(main, ["run", "--config", cfg, "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        document = json.loads((tmp_path / "metrics.json").read_text())
        assert document["config"]["seed"] == 42
        assert document["metrics"]["totals"]["total"] == 4

    def test_flags_override_config_file(self, runner, tmp_path):
        cfg = write_config(tmp_path, "seed = 42\ndelay_fixed_ms = 5\n" + SMALL_WORKLOAD)
        result = runner.invoke(
            main, ["run", "--config", cfg, "--seed", "7", "--delay-fixed-ms", "9", "--out", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output
        document = json.loads((tmp_path / "metrics.json").read_text())
        assert document["config"]["seed"] == 7
        assert document["config"]["delay"] == {"kind": "fixed", "ms": 9}
        # latency doubles the overridden link delay
        assert document["metrics"]["latency_ms"]["mean"] == 18.0

    def test_unknown_config_key_exits_2(self, runner, tmp_path):
        cfg = write_config(tmp_path, "seed = 1\nmystery = 3\n")
        result = runner.invoke(main, ["run", "--config", cfg, "--out", str(tmp_path)])
        assert result.exit_code == 2
        assert "mystery" in result.output

    def test_conflicting_delay_flags_exit_2(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["run", "--seed", "1", "--delay-fixed-ms", "5",
             "--delay-uniform-ms", "1", "10", "--out", str(tmp_path)],
        )
        assert result.exit_code == 2

    def test_trace_writes_ndjson_events(self, runner, tmp_path):
        cfg = write_config(tmp_path, "seed = 3\n" + SMALL_WORKLOAD)
        result = runner.invoke(
            main, ["run", "--config", cfg, "--trace", "--out", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output
        lines = (tmp_path / "events.ndjson").read_text().splitlines()
        events = [json.loads(line) for line in lines]
        assert events
        assert all({"time_ms", "type", "actor", "message_id", "detail"} <= set(e) for e in events)

    def test_repeat_invocations_byte_identical_metrics(self, runner, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        for out in (out_a, out_b):
            result = runner.invoke(
                main,
                ["run", "--seed", "11", "--delay-uniform-ms", "1", "10", "--out", str(out)],
            )
            assert result.exit_code == 0, result.output
        assert (out_a / "metrics.json").read_bytes() == (out_b / "metrics.json").read_bytes()


class TestInjectCommand:
    def test_default_plan_reports_total_detection(self, runner, tmp_path):
        result = runner.invoke(main, ["inject", "--seed", "7", "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert "Attack Type" in result.output
        assert "Invalid Signature" in result.output
        assert "50 (100%)" in result.output
        table2 = (tmp_path / "table2.csv").read_text().splitlines()
        assert table2[0] == "Attack Type,Injected,Rejected"
        assert "Invalid Signature,20,20 (100%)" in table2
        assert "Expired Timestamp,15,15 (100%)" in table2
        assert "Malformed Content,15,15 (100%)" in table2
        assert "Total,50,50 (100%)" in table2

    def test_zero_plan_matches_run_byte_for_byte(self, runner, tmp_path):
        out_run, out_inject = tmp_path / "run", tmp_path / "inject"
        assert runner.invoke(
            main, ["run", "--seed", "3", "--out", str(out_run)]
        ).exit_code == 0
        assert runner.invoke(
            main,
            ["inject", "--seed", "3", "--bad-signature", "0", "--expired-timestamp", "0",
             "--malformed-content", "0", "--out", str(out_inject)],
        ).exit_code == 0
        assert (out_run / "metrics.json").read_bytes() == (out_inject / "metrics.json").read_bytes()

    def test_oversized_plan_exits_2(self, runner, tmp_path):
        cfg = write_config(tmp_path, "seed = 1\n" + SMALL_WORKLOAD)
        result = runner.invoke(
            main, ["inject", "--config", cfg, "--bad-signature", "10", "--out", str(tmp_path)]
        )
        assert result.exit_code == 2


class TestSweepCommand:
    def test_sweep_writes_plot_rows(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["sweep", "--seed", "42", "--f", "1..10", "--fanout", "3", "--out", str(tmp_path)],
        )
        assert result.exit_code == 0, result.output
        rows = (tmp_path / "sweep.csv").read_text().splitlines()
        assert rows[0].startswith("n,f,threshold,mean_gossip_sends")
        assert len(rows) == 11
        assert rows[1].startswith("4,1,3,")
        assert rows[10].startswith("31,10,21,")

    def test_single_point_sweep_matches_run_metrics(self, runner, tmp_path):
        out_sweep, out_run = tmp_path / "sweep", tmp_path / "run"
        assert runner.invoke(
            main, ["sweep", "--seed", "42", "--f", "1..1", "--out", str(out_sweep)]
        ).exit_code == 0
        assert runner.invoke(
            main, ["run", "--seed", "42", "--out", str(out_run)]
        ).exit_code == 0
        sweep_doc = json.loads((out_sweep / "metrics.json").read_text())
        run_doc = json.loads((out_run / "metrics.json").read_text())
        assert sweep_doc["points"][0]["metrics"] == run_doc["metrics"]

    def test_malformed_range_exits_2(self, runner, tmp_path):
        result = runner.invoke(
            main, ["sweep", "--seed", "1", "--f", "x..y", "--out", str(tmp_path)]
        )
        assert result.exit_code == 2

    def test_f_zero_exits_2(self, runner, tmp_path):
        result = runner.invoke(
            main, ["sweep", "--seed", "1", "--f", "0..2", "--out", str(tmp_path)]
        )
        assert result.exit_code == 2
