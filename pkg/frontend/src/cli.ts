#!/usr/bin/env node
/**
 * coldion-plots: figure generation from run artifacts.
 *
 *   coldion-plots density --run run_dir/ [--times auto|t1,t2,...]
 *                         [--half-width 2.0] [--curves 6] --out fig1b.svg
 *   coldion-plots rates   --report report.json [--series series.csv] --out rates.svg
 *
 * Output is SVG; a non-.svg extension still receives SVG content (noted on
 * stderr).  Input artifacts are opened read-only and never modified.
 */
import * as fs from "fs";
import * as path from "path";
import { DEFAULT_DENSITY_SPEC, renderDensityEvolution } from "./density.js";
import { DEFAULT_RATE_SPEC, renderRateFits } from "./rates.js";
import { SchemaError } from "./csv.js";

interface Args {
  [key: string]: string;
}

function parseArgs(argv: string[]): { command: string; args: Args } {
  const [command, ...rest] = argv;
  const args: Args = {};
  for (let i = 0; i < rest.length; i += 2) {
    const key = rest[i];
    if (!key.startsWith("--") || i + 1 >= rest.length) {
      throw new Error(`bad argument list near "${key}"`);
    }
    args[key.slice(2)] = rest[i + 1];
  }
  return { command, args };
}

function writeOut(outPath: string, svg: string): void {
  if (path.extname(outPath) !== ".svg") {
    process.stderr.write(
      `note: output is SVG content regardless of the ${path.extname(outPath)} extension\n`,
    );
  }
  fs.mkdirSync(path.dirname(path.resolve(outPath)), { recursive: true });
  fs.writeFileSync(outPath, svg);
}

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs(argv);
  } catch (err) {
    process.stderr.write(`${err instanceof Error ? err.message : err}\n`);
    return 2;
  }
  const { command, args } = parsed;
  try {
    if (command === "density") {
      if (!args.run || !args.out) throw new Error("density requires --run and --out");
      const spec = { ...DEFAULT_DENSITY_SPEC };
      if (args.times && args.times !== "auto") {
        spec.times = args.times.split(",").map(Number);
      }
      if (args["half-width"]) spec.halfWidth = Number(args["half-width"]);
      if (args.curves) spec.nCurves = Number(args.curves);
      writeOut(args.out, renderDensityEvolution(args.run, spec));
      process.stdout.write(`wrote ${args.out}\n`);
      return 0;
    }
    if (command === "rates") {
      if (!args.report || !args.out) throw new Error("rates requires --report and --out");
      const spec = { ...DEFAULT_RATE_SPEC };
      if (args.series) spec.seriesCsv = args.series;
      writeOut(args.out, renderRateFits(args.report, spec));
      process.stdout.write(`wrote ${args.out}\n`);
      return 0;
    }
    process.stderr.write(`unknown command "${command}"; use density or rates\n`);
    return 2;
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`artifact error: ${err.message}\n`);
      return 1;
    }
    process.stderr.write(`${err instanceof Error ? err.message : err}\n`);
    return 1;
  }
}

const isMain =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${path.resolve(process.argv[1])}`).href;
if (isMain) {
  process.exit(main(process.argv.slice(2)));
}
