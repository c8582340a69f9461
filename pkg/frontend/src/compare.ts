// View model of the comparison screen: one row per finished run, KPI means
// straight from the run payloads and distances straight from /evaluate.

import type { EvaluationRow, Run } from "./types.js";

export interface CompareRow {
  runId: string;
  scenarioId: string;
  seed: number;
  meanCycleTime: number;
  p50CycleTime: number;
  meanWaitingTime: number;
  meanProcessingTime: number;
  emdCt: number | null;
  emdWr: number | null;
  normalize: string | null;
}

export function buildCompareRows(runs: Run[], evaluation: EvaluationRow[] | null): CompareRow[] {
  const byLabel = new Map<string, EvaluationRow>();
  for (const row of evaluation ?? []) {
    byLabel.set(row.label, row);
  }
  return runs.map((run) => {
    if (run.status !== "done" || !run.kpis) {
      throw new Error(`run ${run.id} is not finished`);
    }
    const agg = run.kpis.aggregates;
    const distance = byLabel.get(run.id) ?? null;
    return {
      runId: run.id,
      scenarioId: run.scenario_id,
      seed: run.seed,
      meanCycleTime: agg.cycle_time.mean,
      p50CycleTime: agg.cycle_time.p50,
      meanWaitingTime: agg.waiting_time.mean,
      meanProcessingTime: agg.processing_time.mean,
      emdCt: distance ? distance.emd_ct : null,
      emdWr: distance ? distance.emd_wr : null,
      normalize: distance ? distance.normalize : null,
    };
  });
}

export function formatSeconds(seconds: number): string {
  if (!Number.isFinite(seconds)) {
    return "-";
  }
  if (seconds >= 48 * 3600) {
    return `${(seconds / 86400).toFixed(1)} d`;
  }
  if (seconds >= 7200) {
    return `${(seconds / 3600).toFixed(1)} h`;
  }
  if (seconds >= 120) {
    return `${(seconds / 60).toFixed(1)} min`;
  }
  return `${seconds.toFixed(0)} s`;
}
