#!/usr/bin/env node
// manetsim-plot: turn an aggregate.csv into one SVG line chart per call.
//
//   manetsim-plot plot --in aggregate.csv --axis speed|range \
//       --metric pdr|delay --out figure.svg [--dump data.json]
//
// --dump writes the exact per-algorithm (x, y) arrays that were plotted,
// which is what the fidelity tests read back.

import fs from "node:fs";
import { parseResultsCsv } from "./csv.js";
import { Axis, FigureSpec, Metric, dumpData, renderSvg, selectSeries } from "./figure.js";

interface CliArgs {
  input: string;
  axis: Axis;
  metric: Metric;
  output: string;
  dump?: string;
}

const USAGE =
  "usage: manetsim-plot plot --in <aggregate.csv> --axis speed|range " +
  "--metric pdr|delay --out <figure.svg> [--dump <data.json>]";

export function parseArgs(argv: string[]): CliArgs {
  if (argv[0] !== "plot") {
    throw new Error(USAGE);
  }
  const values = new Map<string, string>();
  for (let i = 1; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (!flag.startsWith("--") || value === undefined) {
      throw new Error(USAGE);
    }
    values.set(flag.slice(2), value);
  }
  const input = values.get("in");
  const axis = values.get("axis");
  const metric = values.get("metric");
  const output = values.get("out");
  if (!input || !axis || !metric || !output) {
    throw new Error(USAGE);
  }
  if (axis !== "speed" && axis !== "range") {
    throw new Error(`--axis must be speed or range, got ${axis}`);
  }
  if (metric !== "pdr" && metric !== "delay") {
    throw new Error(`--metric must be pdr or delay, got ${metric}`);
  }
  for (const key of values.keys()) {
    if (!["in", "axis", "metric", "out", "dump"].includes(key)) {
      throw new Error(`unknown flag --${key}\n${USAGE}`);
    }
  }
  return { input, axis, metric, output, dump: values.get("dump") };
}

export function runPlot(args: CliArgs): void {
  const text = fs.readFileSync(args.input, "utf-8");
  const rows = parseResultsCsv(text);
  const spec: FigureSpec = { axis: args.axis, metric: args.metric };
  const series = selectSeries(rows, spec);
  fs.writeFileSync(args.output, renderSvg(series, spec));
  if (args.dump) {
    fs.writeFileSync(args.dump, JSON.stringify(dumpData(series, spec), null, 2));
  }
}

export function main(argv: string[]): number {
  try {
    runPlot(parseArgs(argv));
    return 0;
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
