#!/usr/bin/env node
/**
 * plot --kind wallclock|messages|cost|failures|schedule --in <csv/json> --out <svg>
 *
 * Reads a harness artifact and writes a self-contained SVG figure.
 * Exits 1 on unknown kinds, unreadable inputs or schema mismatches.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { FIGURE_KINDS, renderFigure } from "./render.js";
import { FigureKind } from "./types.js";

interface Args {
  kind: FigureKind;
  input: string;
  output: string;
}

export function parseArgs(argv: string[]): Args {
  const positional: string[] = [];
  const named = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 1) {
    const token = argv[i];
    if (token.startsWith("--")) {
      const value = argv[i + 1];
      if (value === undefined) {
        throw new Error(`missing value for ${token}`);
      }
      named.set(token.slice(2), value);
      i += 1;
    } else {
      positional.push(token);
    }
  }
  const kind = named.get("kind");
  const input = named.get("in");
  const output = named.get("out");
  if (!kind || !input || !output) {
    throw new Error("usage: plot --kind <kind> --in <csv/json> --out <svg>");
  }
  if (!FIGURE_KINDS.includes(kind as FigureKind)) {
    throw new Error(`unknown kind ${kind}; expected one of ${FIGURE_KINDS.join(", ")}`);
  }
  return { kind: kind as FigureKind, input, output };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
  try {
    const text = readFileSync(args.input, "utf8");
    const result = renderFigure(args.kind, text);
    writeFileSync(args.output, result.svg);
    console.log(`wrote ${args.output} (${result.seriesCount} series)`);
    return 0;
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
