// Payload shapes of the /api/v1 endpoints.

export interface CalendarEntry {
  weekday: string;
  beginTime: string;
  endTime: string;
}

export interface Distribution {
  family: string;
  params: number[];
}

export interface PerformanceItem {
  activity: string;
  distribution: Distribution;
}

export interface ResourceProfileDoc {
  id: string;
  cost_per_hour: number;
  calendar: CalendarEntry[];
  performance: PerformanceItem[];
}

export interface BranchingItem {
  arc: string;
  probability: number;
}

export interface ScenarioDoc {
  resource_profiles: ResourceProfileDoc[];
  arrival: { distribution: Distribution; calendar: CalendarEntry[] };
  branching: BranchingItem[];
}

export interface GraphSummary {
  activities: string[];
  gateways: Record<string, string>;
  exclusive_split_arcs: Record<string, string[]>;
}

export interface Scenario {
  id: string;
  label: string;
  parent_id: string | null;
  scenario: ScenarioDoc;
  graph_summary?: GraphSummary;
  has_source_log?: boolean;
}

export interface ScenarioListItem {
  id: string;
  label: string;
  parent_id: string | null;
}

export interface AggregateStats {
  count: number;
  mean: number;
  min: number;
  max: number;
  p50: number;
  p90: number;
}

export interface Kpis {
  cycle_times: Record<string, number>;
  waiting_times: number[];
  processing_times: number[];
  utilization: Record<string, number>;
  enablement_missing: number;
  aggregates: Record<string, AggregateStats>;
}

export type RunStatus = "pending" | "running" | "done" | "failed";

export interface Run {
  id: string;
  scenario_id: string;
  status: RunStatus;
  p_cases: number;
  seed: number;
  start_at: string;
  kpis?: Kpis;
  report?: Record<string, unknown>;
  error?: string;
}

export interface EvaluationRow {
  label: string;
  emd_ct: number;
  emd_wr: number;
  normalize: string;
  wr_mode: string;
  mean_cycle_time_delta: number;
  mean_waiting_time_delta: number;
  mean_processing_time_delta: number;
}

export interface ProfilePatch {
  calendar?: CalendarEntry[];
  performance?: PerformanceItem[];
  cost_per_hour?: number;
}
