import { AggregateRow } from "./types.js";

export const REQUIRED_COLUMNS = [
  "n_agents",
  "algorithm",
  "wallclock_s",
  "messages",
  "cost",
  "failure_ratio",
] as const;

export class SchemaError extends Error {}

/** Parse the harness aggregate CSV. Lines starting with '#' carry metadata. */
export function parseAggregateCsv(text: string): AggregateRow[] {
  const lines = text
    .split(/\r?\n/)
    .map((line) => line.trim())
    .filter((line) => line.length > 0 && !line.startsWith("#"));
  if (lines.length === 0) {
    throw new SchemaError(`empty CSV; missing columns: ${REQUIRED_COLUMNS.join(", ")}`);
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const missing = REQUIRED_COLUMNS.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(`missing columns: ${missing.join(", ")}`);
  }
  const index = new Map(header.map((name, i) => [name, i]));
  const rows: AggregateRow[] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    if (cells.length < header.length) {
      throw new SchemaError(`short row: ${line}`);
    }
    const num = (column: string): number => {
      const raw = cells[index.get(column)!];
      const value = Number(raw);
      if (Number.isNaN(value)) {
        throw new SchemaError(`non-numeric ${column}: ${raw}`);
      }
      return value;
    };
    rows.push({
      n_agents: num("n_agents"),
      algorithm: cells[index.get("algorithm")!].trim(),
      wallclock_s: num("wallclock_s"),
      messages: num("messages"),
      cost: num("cost"),
      failure_ratio: num("failure_ratio"),
    });
  }
  return rows;
}

export function algorithmsOf(rows: AggregateRow[]): string[] {
  return [...new Set(rows.map((r) => r.algorithm))].sort();
}
