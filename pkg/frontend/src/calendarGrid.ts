// The 7x24 availability grid behind the calendar editor. Editing granularity
// is fixed at one hour; any hour partially covered by an entry renders as
// active, and writing back always produces hour-aligned entries.

import type { CalendarEntry } from "./types.js";

export const WEEKDAYS = [
  "Monday",
  "Tuesday",
  "Wednesday",
  "Thursday",
  "Friday",
  "Saturday",
  "Sunday",
] as const;

export type Grid = boolean[][]; // [weekday][hour]

export function emptyGrid(): Grid {
  return WEEKDAYS.map(() => new Array<boolean>(24).fill(false));
}

function timeToSeconds(text: string): number {
  const [h, m, s] = text.split(":").map(Number);
  if ([h, m, s].some((x) => Number.isNaN(x))) {
    throw new Error(`bad time of day: ${text}`);
  }
  return h * 3600 + m * 60 + s;
}

function hourToTime(hour: number): string {
  return `${String(hour).padStart(2, "0")}:00:00`;
}

export function entriesToGrid(entries: CalendarEntry[]): Grid {
  const grid = emptyGrid();
  for (const entry of entries) {
    const day = WEEKDAYS.indexOf(entry.weekday as (typeof WEEKDAYS)[number]);
    if (day < 0) {
      throw new Error(`unknown weekday: ${entry.weekday}`);
    }
    const begin = timeToSeconds(entry.beginTime);
    const end = timeToSeconds(entry.endTime);
    const firstHour = Math.floor(begin / 3600);
    const lastHour = Math.min(Math.ceil(end / 3600), 24);
    for (let h = firstHour; h < lastHour; h++) {
      grid[day][h] = true;
    }
  }
  return grid;
}

export function gridToEntries(grid: Grid): CalendarEntry[] {
  const entries: CalendarEntry[] = [];
  grid.forEach((hours, day) => {
    let runStart: number | null = null;
    for (let h = 0; h <= 24; h++) {
      const active = h < 24 && hours[h];
      if (active && runStart === null) {
        runStart = h;
      } else if (!active && runStart !== null) {
        entries.push({
          weekday: WEEKDAYS[day],
          beginTime: hourToTime(runStart),
          endTime: h === 24 ? "24:00:00" : hourToTime(h),
        });
        runStart = null;
      }
    }
  });
  return entries;
}

export function toggleCell(grid: Grid, day: number, hour: number): Grid {
  const next = grid.map((row) => row.slice());
  next[day][hour] = !next[day][hour];
  return next;
}

export function activeHours(grid: Grid): number {
  return grid.reduce((total, row) => total + row.filter(Boolean).length, 0);
}

/** Keep only the first half (rounded up) of each day's active hours. */
export function halveDays(grid: Grid): Grid {
  return grid.map((row) => {
    const active = row.reduce((n, cell) => n + (cell ? 1 : 0), 0);
    const keep = Math.ceil(active / 2);
    let seen = 0;
    return row.map((cell) => {
      if (!cell) {
        return false;
      }
      seen += 1;
      return seen <= keep;
    });
  });
}
