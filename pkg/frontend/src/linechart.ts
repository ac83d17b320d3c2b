import { AggregateRow, METRIC_COLUMNS, METRIC_TITLES, MetricKind } from "./types.js";
import { algorithmsOf } from "./csv.js";
import { ALGORITHM_COLORS, colorFor, esc, fmt, linearScale, svgDocument } from "./svg.js";

const WIDTH = 720;
const HEIGHT = 460;
const MARGIN = { top: 40, right: 160, bottom: 50, left: 70 };

export interface LineChart {
  svg: string;
  seriesCount: number;
}

/** One line per algorithm, agent count on the x axis, metric mean on y. */
export function renderMetricChart(rows: AggregateRow[], kind: MetricKind): LineChart {
  const column = METRIC_COLUMNS[kind];
  const algorithms = algorithmsOf(rows);
  if (algorithms.length === 0) {
    throw new Error("no data rows to plot");
  }
  const xs = [...new Set(rows.map((r) => r.n_agents))].sort((a, b) => a - b);
  const values = rows.map((r) => r[column] as number).filter((v) => Number.isFinite(v));
  const yMax = Math.max(...values, 0);
  const x = linearScale(Math.min(...xs), Math.max(...xs), MARGIN.left, WIDTH - MARGIN.right);
  const y = linearScale(0, yMax * 1.05, HEIGHT - MARGIN.bottom, MARGIN.top);

  const parts: string[] = [];
  parts.push(
    `<text x="${MARGIN.left}" y="20" font-size="15" font-weight="bold">` +
      `${esc(METRIC_TITLES[kind])}</text>`
  );
  for (const tick of x.ticks) {
    const px = x(tick);
    parts.push(
      `<line x1="${fmt(px)}" y1="${MARGIN.top}" x2="${fmt(px)}" y2="${HEIGHT - MARGIN.bottom}" stroke="#eeeeee"/>`,
      `<text x="${fmt(px)}" y="${HEIGHT - MARGIN.bottom + 18}" text-anchor="middle">${fmt(tick)}</text>`
    );
  }
  for (const tick of y.ticks) {
    const py = y(tick);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${fmt(py)}" x2="${WIDTH - MARGIN.right}" y2="${fmt(py)}" stroke="#eeeeee"/>`,
      `<text x="${MARGIN.left - 8}" y="${fmt(py + 4)}" text-anchor="end">${fmt(tick)}</text>`
    );
  }
  parts.push(
    `<line x1="${MARGIN.left}" y1="${HEIGHT - MARGIN.bottom}" x2="${WIDTH - MARGIN.right}" y2="${HEIGHT - MARGIN.bottom}" stroke="black"/>`,
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${HEIGHT - MARGIN.bottom}" stroke="black"/>`,
    `<text x="${fmt((MARGIN.left + WIDTH - MARGIN.right) / 2)}" y="${HEIGHT - 10}" text-anchor="middle">agents</text>`
  );

  algorithms.forEach((algorithm, index) => {
    const color = colorFor(algorithm, ALGORITHM_COLORS);
    const series = rows
      .filter((r) => r.algorithm === algorithm && Number.isFinite(r[column] as number))
      .sort((a, b) => a.n_agents - b.n_agents);
    const points = series.map((r) => `${fmt(x(r.n_agents))},${fmt(y(r[column] as number))}`);
    parts.push(
      `<polyline class="series" data-algorithm="${esc(algorithm)}" fill="none" ` +
        `stroke="${color}" stroke-width="2" points="${points.join(" ")}"/>`
    );
    for (const r of series) {
      parts.push(
        `<circle cx="${fmt(x(r.n_agents))}" cy="${fmt(y(r[column] as number))}" r="3" fill="${color}"/>`
      );
    }
    const ly = MARGIN.top + 18 * index;
    parts.push(
      `<rect x="${WIDTH - MARGIN.right + 16}" y="${ly - 9}" width="12" height="12" fill="${color}"/>`,
      `<text x="${WIDTH - MARGIN.right + 34}" y="${ly + 1}">${esc(algorithm)}</text>`
    );
  });

  return { svg: svgDocument(WIDTH, HEIGHT, parts.join("\n")), seriesCount: algorithms.length };
}
