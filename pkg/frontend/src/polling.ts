import type { ApiClient } from "./api.js";
import type { Run } from "./types.js";

export async function pollRunUntilDone(
  api: ApiClient,
  runId: string,
  options?: { intervalMs?: number; timeoutMs?: number; onUpdate?: (run: Run) => void },
): Promise<Run> {
  const intervalMs = options?.intervalMs ?? 500;
  const timeoutMs = options?.timeoutMs ?? 300_000;
  const startedAt = Date.now();
  for (;;) {
    const run = await api.getRun(runId);
    options?.onUpdate?.(run);
    if (run.status === "done") {
      return run;
    }
    if (run.status === "failed") {
      throw new Error(run.error ?? `run ${runId} failed`);
    }
    if (Date.now() - startedAt > timeoutMs) {
      throw new Error(`run ${runId} timed out after ${timeoutMs} ms`);
    }
    await new Promise((resolve) => setTimeout(resolve, intervalMs));
  }
}
