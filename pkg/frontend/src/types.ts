export interface AggregateRow {
  n_agents: number;
  algorithm: string;
  wallclock_s: number;
  messages: number;
  cost: number;
  failure_ratio: number;
}

export interface ScheduleEntry {
  agent: number;
  start: number;
  end: number;
  label: string;
}

export interface ScheduleDocument {
  schema_version: number;
  algorithm: string;
  wall_clock: number;
  entries: ScheduleEntry[];
}

export type MetricKind = "wallclock" | "messages" | "cost" | "failures";
export type FigureKind = MetricKind | "schedule";

export const METRIC_COLUMNS: Record<MetricKind, keyof AggregateRow> = {
  wallclock: "wallclock_s",
  messages: "messages",
  cost: "cost",
  failures: "failure_ratio",
};

export const METRIC_TITLES: Record<MetricKind, string> = {
  wallclock: "Mean simulated wall-clock runtime [s]",
  messages: "Mean messages exchanged",
  cost: "Mean relative prolongation",
  failures: "Failed instance ratio",
};
