// Client-side checks mirroring the server's scenario schema, so edits fail
// fast in the form instead of as a 400 after submission.

import { WEEKDAYS } from "./calendarGrid.js";
import type { CalendarEntry, Distribution } from "./types.js";

const FAMILY_ARITY: Record<string, number> = {
  fixed: 1,
  uniform: 2,
  normal: 2,
  exponential: 1,
  lognormal: 2,
  gamma: 2,
};

const TIME_PATTERN = /^([01]\d|2[0-4]):[0-5]\d:[0-5]\d$/;

function timeToSeconds(text: string): number {
  const [h, m, s] = text.split(":").map(Number);
  return h * 3600 + m * 60 + s;
}

export function validateCalendarEntries(entries: CalendarEntry[]): string[] {
  const problems: string[] = [];
  entries.forEach((entry, i) => {
    if (!(WEEKDAYS as readonly string[]).includes(entry.weekday)) {
      problems.push(`entry ${i + 1}: unknown weekday ${entry.weekday}`);
      return;
    }
    if (!TIME_PATTERN.test(entry.beginTime) || !TIME_PATTERN.test(entry.endTime)) {
      problems.push(`entry ${i + 1}: times must be HH:MM:SS`);
      return;
    }
    const begin = timeToSeconds(entry.beginTime);
    const end = timeToSeconds(entry.endTime);
    if (begin >= end) {
      problems.push(`entry ${i + 1}: beginTime must precede endTime`);
    }
    if (end > 24 * 3600) {
      problems.push(`entry ${i + 1}: endTime beyond 24:00:00`);
    }
  });
  return problems;
}

export function validateDistribution(dist: Distribution): string[] {
  const arity = FAMILY_ARITY[dist.family];
  if (arity === undefined) {
    return [`unknown distribution family ${dist.family}`];
  }
  if (dist.params.length !== arity) {
    return [`${dist.family} takes ${arity} parameter(s), got ${dist.params.length}`];
  }
  const problems: string[] = [];
  const p = dist.params;
  if (p.some((x) => !Number.isFinite(x))) {
    problems.push("parameters must be finite numbers");
    return problems;
  }
  switch (dist.family) {
    case "fixed":
      if (p[0] < 0) problems.push("fixed duration must be nonnegative");
      break;
    case "uniform":
      if (!(0 <= p[0] && p[0] <= p[1])) problems.push("uniform needs 0 <= low <= high");
      break;
    case "normal":
      if (p[1] < 0) problems.push("normal std must be nonnegative");
      break;
    case "exponential":
      if (p[0] <= 0) problems.push("exponential mean must be positive");
      break;
    case "lognormal":
      if (p[1] < 0) problems.push("lognormal sigma must be nonnegative");
      break;
    case "gamma":
      if (p[0] <= 0 || p[1] <= 0) problems.push("gamma shape and scale must be positive");
      break;
  }
  return problems;
}
