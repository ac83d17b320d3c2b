import { FigureKind, MetricKind, ScheduleDocument } from "./types.js";
import { parseAggregateCsv } from "./csv.js";
import { renderMetricChart } from "./linechart.js";
import { renderSchedule } from "./gantt.js";

export interface RenderResult {
  svg: string;
  seriesCount: number;
}

export const FIGURE_KINDS: FigureKind[] = [
  "wallclock",
  "messages",
  "cost",
  "failures",
  "schedule",
];

/** Render one figure from raw artifact text; kind picks the interpretation. */
export function renderFigure(kind: FigureKind, inputText: string): RenderResult {
  if (kind === "schedule") {
    let doc: ScheduleDocument;
    try {
      doc = JSON.parse(inputText) as ScheduleDocument;
    } catch (err) {
      throw new Error(`schedule input is not valid JSON: ${err}`);
    }
    const chart = renderSchedule(doc);
    return { svg: chart.svg, seriesCount: chart.agents };
  }
  const rows = parseAggregateCsv(inputText);
  const chart = renderMetricChart(rows, kind as MetricKind);
  return { svg: chart.svg, seriesCount: chart.seriesCount };
}
