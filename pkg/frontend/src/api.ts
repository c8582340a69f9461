// Typed client for /api/v1. The UI never computes simulation results
// itself; every displayed number originates from these calls.

import type {
  EvaluationRow,
  ProfilePatch,
  Run,
  Scenario,
  ScenarioListItem,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`API error ${status}: ${detail}`);
  }
}

async function parseError(response: Response): Promise<never> {
  let detail = response.statusText;
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (body.detail !== undefined) {
      detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
    }
  } catch {
    // non-JSON error body: keep the status text
  }
  throw new ApiError(response.status, detail);
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/v1${path}`, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      await parseError(response);
    }
    return (await response.json()) as T;
  }

  createScenario(input: {
    bpmn_xml: string;
    log_csv: string;
    label?: string;
    params?: Record<string, unknown>;
  }): Promise<Scenario> {
    return this.request("POST", "/scenarios", input);
  }

  listScenarios(): Promise<ScenarioListItem[]> {
    return this.request("GET", "/scenarios");
  }

  getScenario(id: string): Promise<Scenario> {
    return this.request("GET", `/scenarios/${id}`);
  }

  deriveScenario(id: string, label: string): Promise<Scenario> {
    return this.request("POST", `/scenarios/${id}/derive`, { label });
  }

  patchProfile(scenarioId: string, resourceId: string, patch: ProfilePatch): Promise<Scenario> {
    return this.request("PATCH", `/scenarios/${scenarioId}/profiles/${resourceId}`, patch);
  }

  createRun(input: {
    scenario_id: string;
    p_cases: number;
    seed: number;
    start_at?: string;
  }): Promise<Run> {
    return this.request("POST", "/runs", input);
  }

  listRuns(scenarioId?: string): Promise<Run[]> {
    const query = scenarioId ? `?scenario_id=${encodeURIComponent(scenarioId)}` : "";
    return this.request("GET", `/runs${query}`);
  }

  getRun(id: string): Promise<Run> {
    return this.request("GET", `/runs/${id}`);
  }

  async getRunLog(id: string): Promise<string> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/v1/runs/${id}/log`);
    if (!response.ok) {
      await parseError(response);
    }
    return response.text();
  }

  evaluate(input: {
    run_ids: string[];
    real_log_csv?: string;
    scenario_id?: string;
    normalize?: string;
    wr_mode?: string;
  }): Promise<EvaluationRow[]> {
    return this.request("POST", "/evaluate", input);
  }
}
