import json

import pytest

from diffsim import load_scenario, parse_bpmn, read_log, simulate, write_log
from diffsim.bpmn import write_bpmn
from diffsim.cli import main
from diffsim.simulator import SimConfig

from conftest import ts
from test_simulator import _office_model


@pytest.fixture
def workspace(tmp_path):
    """A BPMN file plus a simulated 'real' log for the office model."""
    model = _office_model()
    bpmn_path = tmp_path / "model.bpmn"
    bpmn_path.write_text(write_bpmn(model.graph))
    log, _, _ = simulate(model, SimConfig(p_cases=120, start_at=ts(0, 9, 0), seed=17))
    log_path = tmp_path / "real.csv"
    log_path.write_text(write_log(log))
    return tmp_path, bpmn_path, log_path


def test_bpmn_write_parse_round_trip():
    model = _office_model()
    parsed = parse_bpmn(write_bpmn(model.graph))
    assert parsed.structurally_equal(model.graph)


class TestDiscoverCommand:
    def test_discover_writes_loadable_scenario(self, workspace, capsys):
        tmp, bpmn, log = workspace
        out = tmp / "scenario.json"
        report = tmp / "report.json"
        code = main(
            [
                "discover", "--log", str(log), "--bpmn", str(bpmn),
                "--out", str(out), "--report", str(report),
                "--part", "0.0",
            ]
        )
        assert code == 0
        model = load_scenario(out.read_text(), parse_bpmn(bpmn.read_text()))
        assert model.profiles
        doc = json.loads(report.read_text())
        assert doc["mode"] == "differentiated"
        assert set(doc["participation"]) == {"anna", "bert", "carla"}

    def test_baseline_mode_flag(self, workspace):
        tmp, bpmn, log = workspace
        out = tmp / "baseline.json"
        code = main(
            ["discover", "--log", str(log), "--bpmn", str(bpmn), "--out", str(out),
             "--mode", "sp-np-na"]
        )
        assert code == 0
        doc = json.loads(out.read_text())
        calendars = {json.dumps(p["calendar"]) for p in doc["resource_profiles"]}
        assert len(calendars) == 1  # one shared aggregate calendar

    def test_bad_granule_is_usage_error(self, workspace):
        tmp, bpmn, log = workspace
        code = main(
            ["discover", "--log", str(log), "--bpmn", str(bpmn),
             "--out", str(tmp / "x.json"), "--granule", "7"]
        )
        assert code == 2

    def test_params_json_block_overrides_flags(self, workspace):
        tmp, bpmn, log = workspace
        config = tmp / "params.json"
        config.write_text(json.dumps({
            "granule_minutes": 120, "d_conf": 0.2, "d_supp": 0.6,
            "d_part": 0.0, "bin_size": 40, "mode": "differentiated",
        }))
        report = tmp / "report.json"
        code = main(
            ["discover", "--log", str(log), "--bpmn", str(bpmn),
             "--out", str(tmp / "s.json"), "--report", str(report),
             "--params-json", str(config), "--granule", "60"]
        )
        assert code == 0
        assert json.loads(report.read_text())["params"]["granule_minutes"] == 120

    def test_grid_search_reports_chosen_tuple(self, workspace, capsys):
        tmp, bpmn, log = workspace
        out = tmp / "scenario.json"
        report = tmp / "report.json"
        code = main(
            [
                "discover", "--log", str(log), "--bpmn", str(bpmn),
                "--out", str(out), "--report", str(report),
                "--grid-search",
                "--grid-conf", "0.1,0.5",
                "--grid-supp", "0.7",
                "--grid-part", "0.0",
                "--grid-granule", "60,120",
                "--grid-cases", "60",
            ]
        )
        assert code == 0
        assert "grid search: best tuple granule=60" in capsys.readouterr().out
        doc = json.loads(report.read_text())
        # the hour-aligned true calendars make the 60-minute granule win
        assert doc["grid_search"]["best_params"]["granule_minutes"] == 60
        assert len(doc["grid_search"]["trials"]) == 4


class TestSimulateCommand:
    def _discover(self, workspace) -> tuple:
        tmp, bpmn, log = workspace
        out = tmp / "scenario.json"
        assert main(
            ["discover", "--log", str(log), "--bpmn", str(bpmn), "--out", str(out),
             "--part", "0.0"]
        ) == 0
        return tmp, bpmn, out

    def test_repeated_seed_byte_identical(self, workspace):
        tmp, bpmn, scenario = self._discover(workspace)
        args = [
            "simulate", "--scenario", str(scenario), "--bpmn", str(bpmn),
            "--cases", "40", "--start-at", "2022-01-03T09:00:00", "--seed", "5",
        ]
        assert main(args + ["--out-log", str(tmp / "a.csv")]) == 0
        assert main(args + ["--out-log", str(tmp / "b.csv")]) == 0
        assert (tmp / "a.csv").read_bytes() == (tmp / "b.csv").read_bytes()

    def test_zero_cases_usage_error(self, workspace):
        tmp, bpmn, scenario = self._discover(workspace)
        code = main(
            ["simulate", "--scenario", str(scenario), "--bpmn", str(bpmn),
             "--cases", "0", "--start-at", "2022-01-03T09:00:00",
             "--out-log", str(tmp / "x.csv")]
        )
        assert code == 2

    def test_kpis_and_report_written(self, workspace):
        tmp, bpmn, scenario = self._discover(workspace)
        code = main(
            ["simulate", "--scenario", str(scenario), "--bpmn", str(bpmn),
             "--cases", "25", "--start-at", "2022-01-03T09:00:00", "--seed", "1",
             "--out-log", str(tmp / "sim.csv"),
             "--out-kpis", str(tmp / "kpis.json"),
             "--out-report", str(tmp / "run.json")]
        )
        assert code == 0
        kpis = json.loads((tmp / "kpis.json").read_text())
        assert "cycle_time" in kpis["aggregates"]
        report = json.loads((tmp / "run.json").read_text())
        assert report["completed_cases"] + len(report["aborted_cases"]) + len(
            report["deadlocked_cases"]
        ) == 25
        # emitted log parses back
        assert read_log((tmp / "sim.csv").read_text()).event_count > 0


class TestEvaluateCommand:
    def test_real_vs_itself_zero_row(self, workspace, capsys):
        tmp, bpmn, log = workspace
        code = main(["evaluate", "--real", str(log), str(log)])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2
        cells = lines[1].split("\t")
        assert float(cells[1]) == 0.0  # emd_ct
        assert float(cells[2]) == 0.0  # emd_wr

    def test_two_candidates_deterministic_order(self, workspace, capsys):
        tmp, bpmn, log = workspace
        model = _office_model()
        sim, _, _ = simulate(model, SimConfig(p_cases=60, start_at=ts(0, 9, 0), seed=23))
        sim_path = tmp / "sim.csv"
        sim_path.write_text(write_log(sim))
        code = main(
            ["evaluate", "--real", str(log), str(sim_path), str(log),
             "--json", str(tmp / "table.json")]
        )
        assert code == 0
        rows = json.loads((tmp / "table.json").read_text())
        assert [r["label"] for r in rows] == [str(sim_path), str(log)]
        assert rows[1]["emd_ct"] == 0.0

    def test_missing_file_nonzero_exit(self, workspace):
        tmp, bpmn, log = workspace
        assert main(["evaluate", "--real", str(log), str(tmp / "nope.csv")]) == 1
