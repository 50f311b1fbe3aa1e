#!/usr/bin/env node
/** Benchmark CSV -> SVG figure renderer.
 *
 * Usage:
 *   node dist/src/plot.js --in bench.csv --kind fig1 --out fig1.svg
 *
 * Kinds: values | ratio | constraints | sparsifier_error | fig1 | fig3.
 * fig1 is the two-panel layout (values + ratio); fig3 adds constraint bars.
 * Rendering is deterministic: same CSV -> byte-identical SVG.
 */

import { readFileSync, writeFileSync } from "node:fs";
import process from "node:process";
import { pathToFileURL } from "node:url";

import { parseCsv } from "./csv.js";
import { FigureKind, buildPanels } from "./figures.js";
import { document } from "./svg.js";

interface Args {
  input: string[];
  kind: FigureKind;
  out: string;
}

function parseArgs(argv: string[]): Args {
  let input: string[] = [];
  let kind = "fig1";
  let out = "";
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--in") input = (argv[++i] ?? "").split(",").filter(Boolean);
    else if (a === "--kind") kind = argv[++i] ?? "";
    else if (a === "--out") out = argv[++i] ?? "";
    else throw new Error(`unknown flag '${a}'`);
  }
  if (input.length === 0 || !out) {
    throw new Error("usage: plot --in bench.csv[,more.csv] --kind KIND --out fig.svg");
  }
  const kinds = ["values", "ratio", "constraints", "sparsifier_error", "fig1", "fig3"];
  if (!kinds.includes(kind)) {
    throw new Error(`--kind must be one of ${kinds.join(", ")}`);
  }
  return { input, kind: kind as FigureKind, out };
}

export function render(args: Args): string {
  const rows = args.input.flatMap((path) => parseCsv(readFileSync(path, "utf8")));
  const panels = buildPanels(args.kind, rows);
  return document(panels, panels.length);
}

function main(): void {
  try {
    const args = parseArgs(process.argv.slice(2));
    writeFileSync(args.out, render(args), "utf8");
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    process.exit(1);
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  main();
}

