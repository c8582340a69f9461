// The analyst's what-if loop as plain functions. Both the DOM handlers and
// the end-to-end tests drive exactly these, so "what the UI does" has one
// definition.

import type { ApiClient } from "./api.js";
import { entriesToGrid, gridToEntries, halveDays } from "./calendarGrid.js";
import { pollRunUntilDone } from "./polling.js";
import { validateCalendarEntries } from "./validation.js";
import type { CalendarEntry, Run, Scenario } from "./types.js";

export async function deriveWithCalendar(
  api: ApiClient,
  scenarioId: string,
  resourceId: string,
  calendar: CalendarEntry[],
  label: string,
): Promise<Scenario> {
  const problems = validateCalendarEntries(calendar);
  if (problems.length > 0) {
    throw new Error(`invalid calendar: ${problems.join("; ")}`);
  }
  const derived = await api.deriveScenario(scenarioId, label);
  return api.patchProfile(derived.id, resourceId, { calendar });
}

/** Derive a variant in which one resource keeps only the first half of each
 * day's available hours (the part-time what-if). */
export async function deriveHalfAvailability(
  api: ApiClient,
  scenario: Scenario,
  resourceId: string,
  label = `${scenario.label} (half availability)`,
): Promise<Scenario> {
  const profile = scenario.scenario.resource_profiles.find((p) => p.id === resourceId);
  if (!profile) {
    throw new Error(`scenario has no profile ${resourceId}`);
  }
  const halved = gridToEntries(halveDays(entriesToGrid(profile.calendar)));
  if (halved.length === 0) {
    throw new Error(`halving would empty the calendar of ${resourceId}`);
  }
  return deriveWithCalendar(api, scenario.id, resourceId, halved, label);
}

export async function launchRunAndWait(
  api: ApiClient,
  input: { scenario_id: string; p_cases: number; seed: number; start_at?: string },
  options?: { intervalMs?: number; timeoutMs?: number; onUpdate?: (run: Run) => void },
): Promise<Run> {
  const run = await api.createRun(input);
  return pollRunUntilDone(api, run.id, options);
}
