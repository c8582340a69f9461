// DOM wiring of the what-if loop. All state lives on the server; this file
// renders it and forwards edits through the workflow functions.

import { ApiClient, ApiError } from "./api.js";
import { WEEKDAYS, entriesToGrid, gridToEntries, toggleCell, type Grid } from "./calendarGrid.js";
import { buildCompareRows, formatSeconds, type CompareRow } from "./compare.js";
import { binSeries } from "./histogram.js";
import { deriveWithCalendar, launchRunAndWait } from "./workflow.js";
import { validateDistribution } from "./validation.js";
import type { Run, Scenario } from "./types.js";

const api = new ApiClient("");

interface AppState {
  scenario: Scenario | null;
  editedCalendars: Map<string, Grid>;
  runs: Run[];
  selectedRuns: Set<string>;
}

const state: AppState = {
  scenario: null,
  editedCalendars: new Map(),
  runs: [],
  selectedRuns: new Set(),
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function flash(message: string, isError = false): void {
  const bar = el<HTMLDivElement>("statusbar");
  bar.textContent = message;
  bar.className = isError ? "status error" : "status";
  if (!isError) {
    setTimeout(() => {
      if (bar.textContent === message) {
        bar.textContent = "";
      }
    }, 6000);
  }
}

async function guarded<T>(work: () => Promise<T>): Promise<T | undefined> {
  try {
    return await work();
  } catch (err) {
    const message = err instanceof ApiError ? err.detail : String(err);
    flash(message, true);
    return undefined;
  }
}

// -- scenario list -------------------------------------------------------------

async function refreshScenarioList(): Promise<void> {
  const items = await api.listScenarios();
  const list = el<HTMLUListElement>("scenario-list");
  list.innerHTML = "";
  for (const item of items) {
    const li = document.createElement("li");
    const link = document.createElement("a");
    link.href = "#";
    link.textContent = item.parent_id ? `${item.label} (from ${item.parent_id})` : item.label;
    link.onclick = (ev) => {
      ev.preventDefault();
      void openScenario(item.id);
    };
    li.appendChild(link);
    list.appendChild(li);
  }
}

async function openScenario(id: string): Promise<void> {
  await guarded(async () => {
    state.scenario = await api.getScenario(id);
    state.editedCalendars = new Map();
    state.selectedRuns = new Set();
    renderScenario();
    await refreshRuns();
  });
}

// -- scenario detail and profile editing ------------------------------------------

function renderScenario(): void {
  const scenario = state.scenario;
  const panel = el<HTMLDivElement>("scenario-panel");
  if (!scenario) {
    panel.hidden = true;
    return;
  }
  panel.hidden = false;
  el<HTMLHeadingElement>("scenario-title").textContent =
    `${scenario.label} - ${scenario.id}` + (scenario.parent_id ? ` (derived from ${scenario.parent_id})` : "");
  const profiles = el<HTMLDivElement>("profiles");
  profiles.innerHTML = "";
  for (const profile of scenario.scenario.resource_profiles) {
    profiles.appendChild(renderProfile(profile.id));
  }
}

function renderProfile(resourceId: string): HTMLElement {
  const scenario = state.scenario!;
  const profile = scenario.scenario.resource_profiles.find((p) => p.id === resourceId)!;
  const box = document.createElement("details");
  box.className = "profile";
  const summary = document.createElement("summary");
  const hours = entriesToGrid(profile.calendar).flat().filter(Boolean).length;
  summary.textContent = `${profile.id} - ${profile.performance.length} activities, ${hours} weekly hours`;
  box.appendChild(summary);

  // calendar grid editor
  const grid = state.editedCalendars.get(resourceId) ?? entriesToGrid(profile.calendar);
  const table = document.createElement("table");
  table.className = "calendar-grid";
  const header = document.createElement("tr");
  header.appendChild(document.createElement("th"));
  for (let hour = 0; hour < 24; hour++) {
    const th = document.createElement("th");
    th.textContent = String(hour);
    header.appendChild(th);
  }
  table.appendChild(header);
  grid.forEach((row, day) => {
    const tr = document.createElement("tr");
    const name = document.createElement("th");
    name.textContent = WEEKDAYS[day].slice(0, 3);
    tr.appendChild(name);
    row.forEach((active, hour) => {
      const td = document.createElement("td");
      td.className = active ? "cell on" : "cell";
      td.onclick = () => {
        const current = state.editedCalendars.get(resourceId) ?? entriesToGrid(profile.calendar);
        state.editedCalendars.set(resourceId, toggleCell(current, day, hour));
        renderScenario();
      };
      tr.appendChild(td);
    });
    table.appendChild(tr);
  });
  box.appendChild(table);

  // distribution editor
  const perf = document.createElement("div");
  perf.className = "perf";
  for (const item of profile.performance) {
    const line = document.createElement("div");
    const label = document.createElement("span");
    label.textContent = `${item.activity}: ${item.distribution.family}(`;
    const input = document.createElement("input");
    input.value = item.distribution.params.join(", ");
    input.size = 18;
    input.onchange = () => {
      const params = input.value.split(",").map((x) => Number(x.trim()));
      const dist = { family: item.distribution.family, params };
      const problems = validateDistribution(dist);
      if (problems.length > 0) {
        flash(problems.join("; "), true);
        input.value = item.distribution.params.join(", ");
        return;
      }
      item.distribution = dist;
      flash(`updated ${profile.id}/${item.activity} locally - use "Derive" to persist`);
    };
    const close = document.createElement("span");
    close.textContent = ")";
    line.append(label, input, close);
    perf.appendChild(line);
  }
  box.appendChild(perf);

  const derive = document.createElement("button");
  derive.textContent = `Derive what-if with edits to ${profile.id}`;
  derive.onclick = () => {
    void guarded(async () => {
      const edited = state.editedCalendars.get(resourceId);
      const calendar = edited ? gridToEntries(edited) : profile.calendar;
      const label = el<HTMLInputElement>("derive-label").value || `${scenario.label}*`;
      const derived = await deriveWithCalendar(api, scenario.id, resourceId, calendar, label);
      await api.patchProfile(derived.id, resourceId, { performance: profile.performance });
      flash(`derived scenario ${derived.id}`);
      await refreshScenarioList();
      await openScenario(derived.id);
    });
  };
  box.appendChild(derive);
  return box;
}

// -- runs ---------------------------------------------------------------------------

async function refreshRuns(): Promise<void> {
  if (!state.scenario) {
    return;
  }
  state.runs = await api.listRuns();
  const tbody = el<HTMLTableSectionElement>("run-rows");
  tbody.innerHTML = "";
  for (const run of state.runs) {
    const tr = document.createElement("tr");
    const pick = document.createElement("td");
    const checkbox = document.createElement("input");
    checkbox.type = "checkbox";
    checkbox.disabled = run.status !== "done";
    checkbox.checked = state.selectedRuns.has(run.id);
    checkbox.onchange = () => {
      if (checkbox.checked) {
        state.selectedRuns.add(run.id);
      } else {
        state.selectedRuns.delete(run.id);
      }
    };
    pick.appendChild(checkbox);
    tr.appendChild(pick);
    for (const text of [
      run.id,
      run.scenario_id,
      String(run.p_cases),
      String(run.seed),
      run.status,
    ]) {
      const td = document.createElement("td");
      td.textContent = text;
      tr.appendChild(td);
    }
    tbody.appendChild(tr);
  }
}

function wireRunLauncher(): void {
  el<HTMLButtonElement>("launch-run").onclick = () => {
    void guarded(async () => {
      if (!state.scenario) {
        throw new Error("open a scenario first");
      }
      const pCases = Number(el<HTMLInputElement>("run-cases").value);
      const seed = Number(el<HTMLInputElement>("run-seed").value);
      flash("run queued…");
      const run = await launchRunAndWait(
        api,
        { scenario_id: state.scenario.id, p_cases: pCases, seed },
        { onUpdate: () => void refreshRuns() },
      );
      flash(`run ${run.id} done`);
      await refreshRuns();
    });
  };
}

// -- comparison ------------------------------------------------------------------------

async function rootWithSourceLog(scenarioId: string): Promise<Scenario> {
  let current = await api.getScenario(scenarioId);
  while (!current.has_source_log && current.parent_id) {
    current = await api.getScenario(current.parent_id);
  }
  if (!current.has_source_log) {
    throw new Error("no ancestor scenario carries a source log to compare against");
  }
  return current;
}

function renderCompareTable(rows: CompareRow[]): void {
  const tbody = el<HTMLTableSectionElement>("compare-rows");
  tbody.innerHTML = "";
  for (const row of rows) {
    const tr = document.createElement("tr");
    const cells = [
      row.runId,
      row.scenarioId,
      formatSeconds(row.meanCycleTime),
      formatSeconds(row.p50CycleTime),
      formatSeconds(row.meanWaitingTime),
      row.emdCt === null ? "-" : `${row.emdCt.toFixed(3)} (${row.normalize})`,
      row.emdWr === null ? "-" : row.emdWr.toFixed(3),
    ];
    for (const text of cells) {
      const td = document.createElement("td");
      td.textContent = text;
      tr.appendChild(td);
    }
    tbody.appendChild(tr);
  }
}

function renderHistograms(series: { label: string; values: number[] }[]): void {
  const svg = el<HTMLElement>("histogram");
  svg.innerHTML = "";
  if (series.length === 0) {
    return;
  }
  const bins = binSeries(series[0].values, series.slice(1).map((s) => s.values));
  const width = 640;
  const height = 200;
  const maxCount = Math.max(...bins.flatMap((h) => h.counts), 1);
  const colors = ["#444", "#c0392b", "#2980b9", "#27ae60", "#8e44ad"];
  bins.forEach((hist, i) => {
    const step = width / hist.counts.length;
    const points = hist.counts
      .map((count, j) => {
        const x = (j * step).toFixed(1);
        const y = (height - (count / maxCount) * (height - 10)).toFixed(1);
        return `${x},${y} ${(j + 1) * step},${y}`;
      })
      .join(" ");
    const path = document.createElementNS("http://www.w3.org/2000/svg", "polyline");
    path.setAttribute("points", points);
    path.setAttribute("fill", "none");
    path.setAttribute("stroke", colors[i % colors.length]);
    path.setAttribute("stroke-width", "1.6");
    svg.appendChild(path);
    const legend = document.createElementNS("http://www.w3.org/2000/svg", "text");
    legend.setAttribute("x", "8");
    legend.setAttribute("y", String(16 + 14 * i));
    legend.setAttribute("fill", colors[i % colors.length]);
    legend.textContent = series[i].label;
    svg.appendChild(legend);
  });
}

function wireCompare(): void {
  el<HTMLButtonElement>("compare-btn").onclick = () => {
    void guarded(async () => {
      const ids = [...state.selectedRuns];
      if (ids.length === 0) {
        throw new Error("select at least one finished run");
      }
      const runs = await Promise.all(ids.map((id) => api.getRun(id)));
      // all selected runs must trace back to the same source log
      const roots = new Set<string>();
      for (const run of runs) {
        roots.add((await rootWithSourceLog(run.scenario_id)).id);
      }
      if (roots.size !== 1) {
        throw new Error("selected runs reference different source logs; compare them separately");
      }
      const rootId = [...roots][0];
      const evaluation = await api.evaluate({ run_ids: ids, scenario_id: rootId });
      renderCompareTable(buildCompareRows(runs, evaluation));
      renderHistograms(
        runs.map((run) => ({
          label: `${run.id} (seed ${run.seed})`,
          values: Object.values(run.kpis!.cycle_times),
        })),
      );
    });
  };
}

// -- scenario upload ----------------------------------------------------------------------

function wireUpload(): void {
  el<HTMLButtonElement>("create-scenario").onclick = () => {
    void guarded(async () => {
      const bpmn = el<HTMLTextAreaElement>("bpmn-input").value;
      const log = el<HTMLTextAreaElement>("log-input").value;
      const label = el<HTMLInputElement>("scenario-label").value || "discovered";
      if (!bpmn.trim() || !log.trim()) {
        throw new Error("paste both the BPMN XML and the event log CSV");
      }
      flash("running discovery…");
      const scenario = await api.createScenario({ bpmn_xml: bpmn, log_csv: log, label });
      flash(`scenario ${scenario.id} discovered`);
      await refreshScenarioList();
      await openScenario(scenario.id);
    });
  };
}

export function startApp(): void {
  wireUpload();
  wireRunLauncher();
  wireCompare();
  el<HTMLButtonElement>("refresh-runs").onclick = () => void guarded(refreshRuns);
  void guarded(refreshScenarioList);
}
