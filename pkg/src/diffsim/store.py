"""File-backed persistence for scenarios and runs.

Everything is a plain file under the state directory; no database. Writes
are guarded by one process-wide lock (desk-scale tool), reads are lock-free
snapshots of immutable files.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from pathlib import Path


class NotFound(KeyError):
    pass


class Conflict(RuntimeError):
    pass


def _new_id() -> str:
    return uuid.uuid4().hex[:12]


def _write_atomic(path: Path, text: str) -> None:
    """Readers must never observe a truncated file."""
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _write_json(path: Path, doc: dict) -> None:
    _write_atomic(path, json.dumps(doc, indent=2))


class FileStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        (self.root / "scenarios").mkdir(parents=True, exist_ok=True)
        (self.root / "runs").mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    # -- scenarios -----------------------------------------------------------

    def _scenario_dir(self, scenario_id: str) -> Path:
        path = self.root / "scenarios" / scenario_id
        if not path.is_dir():
            raise NotFound(f"unknown scenario {scenario_id!r}")
        return path

    def create_scenario(
        self,
        scenario_doc: dict,
        bpmn_xml: str,
        label: str,
        parent_id: str | None = None,
        source_log_csv: str | None = None,
        report: dict | None = None,
    ) -> dict:
        with self._lock:
            scenario_id = _new_id()
            path = self.root / "scenarios" / scenario_id
            path.mkdir()
            meta = {
                "id": scenario_id,
                "label": label,
                "parent_id": parent_id,
                "scenario": scenario_doc,
            }
            _write_json(path / "scenario.json", meta)
            _write_atomic(path / "bpmn.xml", bpmn_xml)
            if source_log_csv is not None:
                _write_atomic(path / "source_log.csv", source_log_csv)
            if report is not None:
                _write_json(path / "report.json", report)
            return meta

    def get_scenario(self, scenario_id: str) -> dict:
        path = self._scenario_dir(scenario_id)
        return json.loads((path / "scenario.json").read_text())

    def get_bpmn(self, scenario_id: str) -> str:
        return (self._scenario_dir(scenario_id) / "bpmn.xml").read_text()

    def get_source_log(self, scenario_id: str) -> str | None:
        path = self._scenario_dir(scenario_id) / "source_log.csv"
        return path.read_text() if path.exists() else None

    def get_report(self, scenario_id: str) -> dict | None:
        path = self._scenario_dir(scenario_id) / "report.json"
        return json.loads(path.read_text()) if path.exists() else None

    def list_scenarios(self) -> list[dict]:
        out = []
        for path in sorted((self.root / "scenarios").iterdir()):
            if (path / "scenario.json").exists():
                doc = json.loads((path / "scenario.json").read_text())
                out.append({"id": doc["id"], "label": doc["label"], "parent_id": doc["parent_id"]})
        return out

    def update_scenario(self, scenario_id: str, scenario_doc: dict) -> dict:
        """Replace the model content of a scenario. Refused while the
        scenario has unfinished runs."""
        with self._lock:
            if self._has_active_runs(scenario_id):
                raise Conflict(f"scenario {scenario_id!r} has unfinished runs")
            path = self._scenario_dir(scenario_id)
            meta = json.loads((path / "scenario.json").read_text())
            meta["scenario"] = scenario_doc
            _write_json(path / "scenario.json", meta)
            return meta

    def derive_scenario(self, scenario_id: str, label: str) -> dict:
        parent = self.get_scenario(scenario_id)
        return self.create_scenario(
            scenario_doc=parent["scenario"],
            bpmn_xml=self.get_bpmn(scenario_id),
            label=label,
            parent_id=scenario_id,
            source_log_csv=self.get_source_log(scenario_id),
        )

    # -- runs ------------------------------------------------------------------

    def _run_dir(self, run_id: str) -> Path:
        path = self.root / "runs" / run_id
        if not path.is_dir():
            raise NotFound(f"unknown run {run_id!r}")
        return path

    def create_run(self, scenario_id: str, config: dict) -> dict:
        self._scenario_dir(scenario_id)  # 404 on unknown scenario
        with self._lock:
            run_id = _new_id()
            path = self.root / "runs" / run_id
            path.mkdir()
            meta = {"id": run_id, "scenario_id": scenario_id, "status": "pending", **config}
            _write_json(path / "run.json", meta)
            return meta

    def get_run(self, run_id: str) -> dict:
        return json.loads((self._run_dir(run_id) / "run.json").read_text())

    def list_runs(self, scenario_id: str | None = None) -> list[dict]:
        out = []
        for path in sorted((self.root / "runs").iterdir()):
            if (path / "run.json").exists():
                meta = json.loads((path / "run.json").read_text())
                if scenario_id is None or meta["scenario_id"] == scenario_id:
                    out.append(meta)
        return out

    def update_run(self, run_id: str, **fields) -> dict:
        with self._lock:
            path = self._run_dir(run_id)
            meta = json.loads((path / "run.json").read_text())
            meta.update(fields)
            _write_json(path / "run.json", meta)
            return meta

    def write_run_artifacts(self, run_id: str, log_csv: str, kpis: dict, report: dict) -> None:
        path = self._run_dir(run_id)
        _write_atomic(path / "log.csv", log_csv)
        _write_json(path / "kpis.json", kpis)
        _write_json(path / "sim_report.json", report)

    def get_run_log(self, run_id: str) -> str:
        path = self._run_dir(run_id) / "log.csv"
        if not path.exists():
            raise NotFound(f"run {run_id!r} has no log yet")
        return path.read_text()

    def get_run_kpis(self, run_id: str) -> dict | None:
        path = self._run_dir(run_id) / "kpis.json"
        return json.loads(path.read_text()) if path.exists() else None

    def get_run_report(self, run_id: str) -> dict | None:
        path = self._run_dir(run_id) / "sim_report.json"
        return json.loads(path.read_text()) if path.exists() else None

    def _has_active_runs(self, scenario_id: str) -> bool:
        return any(
            r["status"] in ("pending", "running") for r in self.list_runs(scenario_id)
        )
