import { describe, expect, it } from "vitest";

import { buildCompareRows, formatSeconds } from "../src/compare.js";
import { binSeries } from "../src/histogram.js";
import type { Kpis, Run } from "../src/types.js";

function doneRun(id: string, meanCycle: number): Run {
  const aggregates = {
    cycle_time: { count: 3, mean: meanCycle, min: 1, max: 2 * meanCycle, p50: meanCycle, p90: 1.5 * meanCycle },
    waiting_time: { count: 3, mean: 40, min: 0, max: 100, p50: 30, p90: 90 },
    processing_time: { count: 3, mean: 300, min: 100, max: 500, p50: 290, p90: 450 },
  };
  const kpis: Kpis = {
    cycle_times: { c1: meanCycle - 5, c2: meanCycle, c3: meanCycle + 5 },
    waiting_times: [0, 40, 80],
    processing_times: [100, 300, 500],
    utilization: {},
    enablement_missing: 0,
    aggregates,
  };
  return {
    id,
    scenario_id: "s1",
    status: "done",
    p_cases: 3,
    seed: 7,
    start_at: "2024-01-01T09:00:00",
    kpis,
  };
}

describe("comparison view model", () => {
  it("joins run KPIs with evaluation rows by run id", () => {
    const rows = buildCompareRows(
      [doneRun("r1", 600), doneRun("r2", 900)],
      [
        {
          label: "r2",
          emd_ct: 3.5,
          emd_wr: 12.5,
          normalize: "mass",
          wr_mode: "absolute-hour",
          mean_cycle_time_delta: 300,
          mean_waiting_time_delta: 0,
          mean_processing_time_delta: 0,
        },
      ],
    );
    expect(rows[0]).toMatchObject({ runId: "r1", meanCycleTime: 600, emdCt: null });
    expect(rows[1]).toMatchObject({
      runId: "r2",
      meanCycleTime: 900,
      emdCt: 3.5,
      emdWr: 12.5,
      normalize: "mass",
    });
  });

  it("refuses unfinished runs", () => {
    const pending = { ...doneRun("r1", 100), status: "pending" as const, kpis: undefined };
    expect(() => buildCompareRows([pending], null)).toThrow(/not finished/);
  });

  it("formats durations at a human scale", () => {
    expect(formatSeconds(42)).toBe("42 s");
    expect(formatSeconds(600)).toBe("10.0 min");
    expect(formatSeconds(7200)).toBe("2.0 h");
    expect(formatSeconds(3 * 86400)).toBe("3.0 d");
  });
});

describe("display histograms", () => {
  it("bins all series on the reference scale", () => {
    const [ref, other] = binSeries([0, 10, 20, 30, 40], [[15, 25, 95]], 4);
    expect(ref.counts.reduce((a, b) => a + b)).toBe(5);
    expect(other.counts.reduce((a, b) => a + b)).toBe(3);
    expect(ref.width).toBe(other.width);
    expect(ref.origin).toBe(other.origin);
    // the 95 lands in an appended overflow bin
    expect(other.counts.length).toBeGreaterThan(4);
  });

  it("keeps the inclusive right edge inside the last base bin", () => {
    const [ref] = binSeries([0, 10], [], 5);
    expect(ref.counts.reduce((a, b) => a + b)).toBe(2);
  });
});
