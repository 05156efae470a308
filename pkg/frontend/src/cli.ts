/**
 * plotkit: log-log convergence figures from solver CSV tables.
 *
 * Usage: node dist/cli.js --csv a.csv b.csv --norm energy --out fig.svg
 *        [--slopes 1,2]
 *
 * Writes the SVG figure to --out and a JSON summary (one entry per CSV
 * with the least-squares fitted slope) to stdout. Nonzero exit on schema
 * mismatch or an empty CSV list.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { parseTable, SchemaError } from "./csv.js";
import { renderFigure } from "./plot.js";
import { fitSlope, labelFor, type FittedLine } from "./slopes.js";

export function run(argv: string[]): number {
  const args = yargs(argv)
    .option("csv", { type: "string", array: true, demandOption: true })
    .option("norm", {
      choices: ["energy", "l2"] as const,
      default: "energy" as const,
    })
    .option("out", { type: "string", demandOption: true })
    .option("slopes", { type: "string", default: "" })
    .strict()
    .exitProcess(false)
    .parseSync();

  if (args.csv.length === 0) {
    process.stderr.write("usage error: at least one --csv path required\n");
    return 2;
  }
  const column = args.norm === "energy" ? "energy_err" : "l2_err";
  const lines: FittedLine[] = [];
  try {
    for (const [index, path] of args.csv.entries()) {
      const rows = parseTable(readFileSync(path, "utf8"));
      const h = rows.map((r) => r.h);
      const err = rows.map((r) => r[column] as number);
      lines.push({
        label: labelFor(path, index),
        h,
        err,
        fittedSlope: fitSlope(h, err),
      });
    }
  } catch (error) {
    if (error instanceof SchemaError) {
      process.stderr.write(`schema error: ${error.message}\n`);
      return 2;
    }
    throw error;
  }
  const referenceSlopes = args.slopes
    .split(",")
    .filter((s) => s.trim() !== "")
    .map(Number);
  if (referenceSlopes.some((s) => !Number.isFinite(s))) {
    process.stderr.write(`usage error: bad --slopes '${args.slopes}'\n`);
    return 2;
  }
  const svg = renderFigure({ lines, norm: args.norm, referenceSlopes });
  writeFileSync(args.out, svg);
  process.stdout.write(
    JSON.stringify(
      {
        norm: args.norm,
        out: args.out,
        lines: lines.map((l) => ({
          label: l.label,
          fittedSlope: l.fittedSlope,
        })),
      },
      null,
      2,
    ) + "\n",
  );
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href;
if (invokedDirectly) {
  process.exit(run(hideBin(process.argv)));
}
