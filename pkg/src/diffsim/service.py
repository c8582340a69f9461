"""HTTP service for the what-if loop: upload a log and model, discover a
scenario, derive and edit variants, launch simulation runs, and compare the
outcomes against the source log.

One engine, two frontends: every handler delegates to the same functions the
CLI uses, and every artifact served here is byte-identical to the CLI output
for the same inputs.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .bpmn import parse_bpmn
from .discovery import DiscoveryParams, discover_resource_profiles
from .eventlog import read_log, write_log
from .metrics import compare_runs
from .model import DifferentiatedSimModel
from .scenario import model_from_dict, scenario_dict
from .simulator import SimConfig, simulate
from .store import Conflict, FileStore, NotFound

DEFAULT_START_AT = "2024-01-01T09:00:00"  # a Monday


class ScenarioRequest(BaseModel):
    bpmn_xml: str
    log_csv: str
    label: str = "discovered"
    params: dict = Field(default_factory=dict)


class DeriveRequest(BaseModel):
    label: str = "derived"


class ProfilePatch(BaseModel):
    calendar: list[dict] | None = None
    performance: list[dict] | None = None
    cost_per_hour: float | None = None


class RunRequest(BaseModel):
    scenario_id: str
    p_cases: int = Field(gt=0)
    seed: int = 0
    start_at: str = DEFAULT_START_AT
    max_events_per_case: int = 1000


class EvaluateRequest(BaseModel):
    run_ids: list[str]
    real_log_csv: str | None = None
    scenario_id: str | None = None
    normalize: str = "mass"
    wr_mode: str = "absolute-hour"


def _load_model(store: FileStore, scenario_id: str) -> DifferentiatedSimModel:
    meta = store.get_scenario(scenario_id)
    graph = parse_bpmn(store.get_bpmn(scenario_id))
    return model_from_dict(meta["scenario"], graph)


def create_app(state_dir: str | None = None, max_workers: int | None = None) -> FastAPI:
    state_dir = state_dir or os.environ.get("DIFFSIM_STATE", "./diffsim-state")
    store = FileStore(state_dir)
    pool = ThreadPoolExecutor(max_workers=max_workers or os.cpu_count() or 2)
    app = FastAPI(title="diffsim", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.store = store

    def _scenario_payload(meta: dict) -> dict:
        graph = parse_bpmn(store.get_bpmn(meta["id"]))
        return {
            **meta,
            "graph_summary": {
                "activities": sorted(graph.activity_labels),
                "gateways": {g: kind.value for g, kind in graph.gateways.items()},
                "exclusive_split_arcs": {
                    g: [f.id for f in graph.outgoing[g]] for g in graph.exclusive_splits()
                },
            },
            "has_source_log": store.get_source_log(meta["id"]) is not None,
        }

    @app.exception_handler(NotFound)
    async def _not_found(_, exc: NotFound):
        raise HTTPException(status_code=404, detail=str(exc))

    @app.exception_handler(Conflict)
    async def _conflict(_, exc: Conflict):
        raise HTTPException(status_code=409, detail=str(exc))

    @app.post("/api/v1/scenarios")
    def create_scenario(req: ScenarioRequest):
        try:
            graph = parse_bpmn(req.bpmn_xml)
            log = read_log(req.log_csv)
            params = DiscoveryParams(**req.params) if req.params else DiscoveryParams()
            model, report = discover_resource_profiles(log, graph, params)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        meta = store.create_scenario(
            scenario_doc=scenario_dict(model),
            bpmn_xml=req.bpmn_xml,
            label=req.label,
            source_log_csv=req.log_csv,
            report=report.to_json(),
        )
        return _scenario_payload(meta)

    @app.get("/api/v1/scenarios")
    def list_scenarios():
        return store.list_scenarios()

    @app.get("/api/v1/scenarios/{scenario_id}")
    def get_scenario(scenario_id: str):
        return _scenario_payload(store.get_scenario(scenario_id))

    @app.get("/api/v1/scenarios/{scenario_id}/report")
    def get_scenario_report(scenario_id: str):
        report = store.get_report(scenario_id)
        if report is None:
            raise HTTPException(status_code=404, detail="scenario has no discovery report")
        return report

    @app.post("/api/v1/scenarios/{scenario_id}/derive")
    def derive_scenario(scenario_id: str, req: DeriveRequest):
        return _scenario_payload(store.derive_scenario(scenario_id, req.label))

    @app.patch("/api/v1/scenarios/{scenario_id}/profiles/{resource_id}")
    def patch_profile(scenario_id: str, resource_id: str, patch: ProfilePatch):
        meta = store.get_scenario(scenario_id)
        doc = meta["scenario"]
        profile = next(
            (p for p in doc["resource_profiles"] if p["id"] == resource_id), None
        )
        if profile is None:
            raise HTTPException(status_code=404, detail=f"unknown profile {resource_id!r}")
        if patch.calendar is not None:
            profile["calendar"] = patch.calendar
        if patch.performance is not None:
            profile["performance"] = patch.performance
        if patch.cost_per_hour is not None:
            profile["cost_per_hour"] = patch.cost_per_hour
        try:
            graph = parse_bpmn(store.get_bpmn(scenario_id))
            model_from_dict(doc, graph)  # full validation before persisting
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return _scenario_payload(store.update_scenario(scenario_id, doc))

    def _execute_run(run_id: str) -> None:
        meta = store.get_run(run_id)
        try:
            store.update_run(run_id, status="running")
            model = _load_model(store, meta["scenario_id"])
            config = SimConfig(
                p_cases=meta["p_cases"],
                start_at=datetime.fromisoformat(meta["start_at"]),
                seed=meta["seed"],
                max_events_per_case=meta.get("max_events_per_case", 1000),
            )
            log, kpis, report = simulate(model, config)
            store.write_run_artifacts(run_id, write_log(log), kpis.to_json(), report.to_json())
            store.update_run(run_id, status="done")
        except Exception as exc:
            store.update_run(run_id, status="failed", error=str(exc))

    @app.post("/api/v1/runs")
    def create_run(req: RunRequest):
        try:
            datetime.fromisoformat(req.start_at)
            _load_model(store, req.scenario_id)  # validate before queuing
        except NotFound:
            raise
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        meta = store.create_run(
            req.scenario_id,
            {
                "p_cases": req.p_cases,
                "seed": req.seed,
                "start_at": req.start_at,
                "max_events_per_case": req.max_events_per_case,
            },
        )
        pool.submit(_execute_run, meta["id"])
        return meta

    @app.get("/api/v1/runs")
    def list_runs(scenario_id: str | None = None):
        return store.list_runs(scenario_id)

    @app.get("/api/v1/runs/{run_id}")
    def get_run(run_id: str):
        meta = store.get_run(run_id)
        if meta["status"] == "done":
            meta["kpis"] = store.get_run_kpis(run_id)
            meta["report"] = store.get_run_report(run_id)
        return meta

    @app.get("/api/v1/runs/{run_id}/log", response_class=PlainTextResponse)
    def get_run_log(run_id: str):
        return store.get_run_log(run_id)

    @app.post("/api/v1/evaluate")
    def evaluate(req: EvaluateRequest):
        if req.real_log_csv is not None:
            real_csv = req.real_log_csv
        elif req.scenario_id is not None:
            real_csv = store.get_source_log(req.scenario_id)
            if real_csv is None:
                raise HTTPException(status_code=400, detail="scenario has no source log")
        else:
            raise HTTPException(status_code=400, detail="need real_log_csv or scenario_id")
        if not req.run_ids:
            raise HTTPException(status_code=400, detail="need at least one run id")
        simulated = []
        for run_id in req.run_ids:
            meta = store.get_run(run_id)
            if meta["status"] != "done":
                raise HTTPException(status_code=400, detail=f"run {run_id} is {meta['status']}")
            simulated.append(read_log(store.get_run_log(run_id)))
        try:
            rows = compare_runs(
                read_log(real_csv),
                simulated,
                labels=req.run_ids,
                normalize=req.normalize,
                wr_mode=req.wr_mode,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return rows

    ui_dir = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"
    if ui_dir.is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    return app
