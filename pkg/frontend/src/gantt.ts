import { ScheduleDocument } from "./types.js";
import { ACTIVITY_COLORS, colorFor, esc, fmt, linearScale, svgDocument } from "./svg.js";

const WIDTH = 720;
const ROW_HEIGHT = 26;
const MARGIN = { top: 48, right: 30, bottom: 40, left: 70 };

export interface GanttChart {
  svg: string;
  makespan: number;
  agents: number;
}

/** Horizontal activity bars per agent, one row each, highest priority on top. */
export function renderSchedule(doc: ScheduleDocument): GanttChart {
  if (!Array.isArray(doc.entries)) {
    throw new Error("schedule document has no entries array");
  }
  const agents = [...new Set(doc.entries.map((e) => e.agent))].sort((a, b) => a - b);
  const makespan = doc.wall_clock ?? Math.max(0, ...doc.entries.map((e) => e.end));
  const height = MARGIN.top + MARGIN.bottom + Math.max(agents.length, 1) * ROW_HEIGHT;
  const x = linearScale(0, Math.max(makespan, 1e-9), MARGIN.left, WIDTH - MARGIN.right);
  const rowOf = new Map(agents.map((agent, i) => [agent, MARGIN.top + i * ROW_HEIGHT]));

  const parts: string[] = [];
  parts.push(
    `<text x="${MARGIN.left}" y="22" font-size="15" font-weight="bold">` +
      `${esc(doc.algorithm)} schedule, makespan ${fmt(makespan)}</text>`
  );
  for (const tick of x.ticks) {
    const px = x(tick);
    parts.push(
      `<line x1="${fmt(px)}" y1="${MARGIN.top - 6}" x2="${fmt(px)}" y2="${height - MARGIN.bottom}" stroke="#eeeeee"/>`,
      `<text x="${fmt(px)}" y="${height - MARGIN.bottom + 16}" text-anchor="middle">${fmt(tick)}</text>`
    );
  }
  for (const agent of agents) {
    const top = rowOf.get(agent)!;
    parts.push(
      `<text x="${MARGIN.left - 10}" y="${fmt(top + ROW_HEIGHT / 2 + 4)}" text-anchor="end">a${agent}</text>`
    );
  }
  for (const entry of doc.entries) {
    const top = rowOf.get(entry.agent)! + 4;
    const x0 = x(entry.start);
    const x1 = x(entry.end);
    const width = Math.max(x1 - x0, 1.0);
    const color = colorFor(entry.label, ACTIVITY_COLORS);
    parts.push(
      `<rect class="activity" data-agent="${entry.agent}" data-label="${esc(entry.label)}" ` +
        `x="${fmt(x0)}" y="${fmt(top)}" width="${fmt(width)}" height="${ROW_HEIGHT - 8}" ` +
        `fill="${color}" stroke="white"/>`
    );
  }
  parts.push(
    `<text x="${fmt((MARGIN.left + WIDTH - MARGIN.right) / 2)}" y="${height - 8}" text-anchor="middle">time [units]</text>`
  );
  return { svg: svgDocument(WIDTH, height, parts.join("\n")), makespan, agents: agents.length };
}
