"""Batch command line: discover, simulate, evaluate, serve.

Exit codes: 0 success, 1 domain error (parse/validation/simulation
failures), 2 usage error (bad flags or values).
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime
from pathlib import Path

from .bpmn import parse_bpmn
from .discovery import (
    MODE_BASELINE,
    MODE_DIFFERENTIATED,
    DiscoveryParams,
    discover_resource_profiles,
)
from .eventlog import read_log, write_log
from .grid import GridSpec, grid_search
from .metrics import NORMALIZE_MODES, WR_MODES, compare_runs
from .scenario import load_scenario, store_scenario
from .simulator import SimConfig, simulate

MODE_FLAGS = {"sp-dp-da": MODE_DIFFERENTIATED, "sp-np-na": MODE_BASELINE}


class UsageError(Exception):
    pass


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(","))


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diffsim",
        description="Business process simulation with individually calendared resources.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("discover", help="discover a simulation scenario from a log")
    d.add_argument("--log", required=True, help="event log CSV")
    d.add_argument("--bpmn", required=True, help="BPMN XML process model")
    d.add_argument("--out", required=True, help="output scenario JSON path")
    d.add_argument("--report", help="output discovery report JSON path")
    d.add_argument("--mode", choices=sorted(MODE_FLAGS), default="sp-dp-da")
    d.add_argument("--granule", type=int, default=60, help="granule size in minutes")
    d.add_argument("--conf", type=float, default=0.1, help="confidence threshold")
    d.add_argument("--supp", type=float, default=0.7, help="support threshold")
    d.add_argument("--part", type=float, default=0.4, help="participation threshold")
    d.add_argument("--bin-size", type=int, default=50, help="min events for an individual fit")
    d.add_argument("--params-json", help="JSON file with discovery parameters; overrides the flags")
    d.add_argument("--grid-search", action="store_true", help="search thresholds by round-trip EMD-CT")
    d.add_argument("--grid-conf", type=_float_list, default=None)
    d.add_argument("--grid-supp", type=_float_list, default=None)
    d.add_argument("--grid-part", type=_float_list, default=None)
    d.add_argument("--grid-granule", type=_int_list, default=None)
    d.add_argument("--grid-seed", type=int, default=1234)
    d.add_argument("--grid-cases", type=int, default=None, help="simulated cases per grid trial")

    s = sub.add_parser("simulate", help="simulate a scenario")
    s.add_argument("--scenario", required=True, help="scenario JSON")
    s.add_argument("--bpmn", required=True, help="BPMN XML process model")
    s.add_argument("--cases", type=int, required=True, help="number of cases")
    s.add_argument("--start-at", required=True, help="simulation start (ISO-8601)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-events-per-case", type=int, default=1000)
    s.add_argument("--out-log", required=True, help="output log CSV path")
    s.add_argument("--out-kpis", help="output KPI JSON path")
    s.add_argument("--out-report", help="output run report JSON path")

    e = sub.add_parser("evaluate", help="compare simulated logs against a real one")
    e.add_argument("--real", required=True, help="reference log CSV")
    e.add_argument("simulated", nargs="+", help="simulated log CSV paths")
    e.add_argument("--normalize", choices=NORMALIZE_MODES, default="mass")
    e.add_argument("--wr-mode", choices=WR_MODES, default="absolute-hour")
    e.add_argument("--csv", help="write the comparison table as CSV")
    e.add_argument("--json", dest="json_out", help="write the comparison table as JSON")

    v = sub.add_parser("serve", help="run the HTTP service")
    v.add_argument("--port", type=int, default=8000)
    v.add_argument("--host", default="127.0.0.1")
    v.add_argument("--state-dir", default=None, help="persistence directory (env DIFFSIM_STATE)")
    return parser


def _cmd_discover(args) -> int:
    log = read_log(Path(args.log).read_text())
    graph = parse_bpmn(Path(args.bpmn).read_text())
    if args.params_json:
        params = DiscoveryParams.from_json(json.loads(Path(args.params_json).read_text()))
    else:
        params = DiscoveryParams(
            granule_minutes=args.granule,
            d_conf=args.conf,
            d_supp=args.supp,
            d_part=args.part,
            bin_size=args.bin_size,
            mode=MODE_FLAGS[args.mode],
        )
    grid_result = None
    if args.grid_search:
        spec = GridSpec(seed=args.grid_seed)
        if args.grid_conf:
            spec.conf = args.grid_conf
        if args.grid_supp:
            spec.supp = args.grid_supp
        if args.grid_part:
            spec.part = args.grid_part
        if args.grid_granule:
            spec.granule = args.grid_granule
        if args.grid_cases:
            spec.p_cases = args.grid_cases
        grid_result = grid_search(log, graph, params, spec)
        params = grid_result.best_params
        print(
            f"grid search: best tuple granule={params.granule_minutes} "
            f"conf={params.d_conf} supp={params.d_supp} part={params.d_part} "
            f"(round-trip EMD-CT {grid_result.best_score:.4f})"
        )
    model, report = discover_resource_profiles(log, graph, params)
    provenance = {
        "log": str(args.log),
        "bpmn": str(args.bpmn),
        "params": params.to_json(),
    }
    Path(args.out).write_text(store_scenario(model, provenance))
    if args.report:
        doc = report.to_json()
        if grid_result is not None:
            doc["grid_search"] = grid_result.to_json()
        Path(args.report).write_text(json.dumps(doc, indent=2) + "\n")
    print(f"scenario written to {args.out} ({len(model.profiles)} resource profiles)")
    return 0


def _cmd_simulate(args) -> int:
    if args.cases < 1:
        raise UsageError("--cases must be a positive integer")
    try:
        start_at = datetime.fromisoformat(args.start_at)
    except ValueError:
        raise UsageError(f"--start-at is not an ISO-8601 timestamp: {args.start_at!r}")
    graph = parse_bpmn(Path(args.bpmn).read_text())
    model = load_scenario(Path(args.scenario).read_text(), graph)
    config = SimConfig(
        p_cases=args.cases,
        start_at=start_at,
        seed=args.seed,
        max_events_per_case=args.max_events_per_case,
    )
    log, kpis, report = simulate(model, config)
    Path(args.out_log).write_text(write_log(log))
    if args.out_kpis:
        Path(args.out_kpis).write_text(json.dumps(kpis.to_json(), indent=2) + "\n")
    if args.out_report:
        Path(args.out_report).write_text(json.dumps(report.to_json(), indent=2) + "\n")
    print(
        f"simulated {report.completed_cases}/{config.p_cases} cases "
        f"({report.events_executed} events) in {report.wall_seconds:.2f} s -> {args.out_log}"
    )
    return 0


def _cmd_evaluate(args) -> int:
    real = read_log(Path(args.real).read_text())
    simulated = [read_log(Path(p).read_text()) for p in args.simulated]
    rows = compare_runs(
        real,
        simulated,
        labels=[str(p) for p in args.simulated],
        normalize=args.normalize,
        wr_mode=args.wr_mode,
    )
    header = [
        "label",
        "emd_ct",
        "emd_wr",
        "mean_cycle_time_delta",
        "mean_waiting_time_delta",
        "mean_processing_time_delta",
    ]
    print("\t".join(header))
    for row in rows:
        print("\t".join(_fmt(row[k]) for k in header))
    if args.csv:
        import csv as _csv

        with open(args.csv, "w", newline="") as fh:
            writer = _csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
    if args.json_out:
        Path(args.json_out).write_text(json.dumps(rows, indent=2) + "\n")
    return 0


def _fmt(value) -> str:
    return f"{value:.6g}" if isinstance(value, float) else str(value)


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.state_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "discover": _cmd_discover,
        "simulate": _cmd_simulate,
        "evaluate": _cmd_evaluate,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        message = str(exc)
        if "granule" in message or "must be" in message or "must lie" in message:
            print(f"usage error: {message}", file=sys.stderr)
            return 2
        print(f"error: {message}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # domain errors from the engine
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
