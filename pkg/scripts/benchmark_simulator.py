#!/usr/bin/env python3
"""Simulation throughput benchmark over case counts and resource pools."""

import argparse
import time
from datetime import datetime

from diffsim.simulator import SimConfig, simulate
from diffsim.synthetic import experiment_model


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cases", default="100,1000,5000")
    parser.add_argument("--resources", default="20,34")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    start = datetime(2022, 1, 3, 8)
    print(f"{'resources':>9} {'cases':>7} {'events':>8} {'seconds':>8} {'events/s':>9}")
    for n_res in (int(x) for x in args.resources.split(",")):
        model = experiment_model(n_resources=n_res)
        for cases in (int(x) for x in args.cases.split(",")):
            t0 = time.perf_counter()
            _, _, report = simulate(
                model, SimConfig(p_cases=cases, start_at=start, seed=args.seed)
            )
            dt = time.perf_counter() - t0
            print(
                f"{n_res:>9} {cases:>7} {report.events_executed:>8} "
                f"{dt:>8.2f} {report.events_executed / dt:>9.0f}"
            )


if __name__ == "__main__":
    main()
