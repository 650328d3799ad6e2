/**
 * `plot` command: sweep CSV in, SVG figure out.
 *
 *   plot --in sweep.csv --out fig.svg [--title "..."]
 *
 * Exit code 0 on success; 1 with a message on stderr for anything wrong
 * with the arguments, the input file, or the CSV contract.
 */

import { readFile, writeFile } from "node:fs/promises";

import { buildBerChart } from "./chart.js";
import { CsvContractError, groupCurves, parseSweepCsv } from "./csv.js";

export const USAGE = 'usage: plot --in <sweep.csv> --out <fig.svg> [--title "..."]';

export interface PlotArgs {
  inPath: string;
  outPath: string;
  title?: string;
}

/** Thrown for malformed command lines; message is the complaint. */
export class UsageError extends Error {}

export function parseArgs(argv: string[]): PlotArgs {
  const values = new Map<string, string>();
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i]!;
    let name: string;
    let value: string;
    const eq = arg.indexOf("=");
    if (arg.startsWith("--") && eq > 2) {
      name = arg.slice(2, eq);
      value = arg.slice(eq + 1);
    } else if (arg.startsWith("--") && i + 1 < argv.length) {
      name = arg.slice(2);
      value = argv[++i]!;
    } else {
      throw new UsageError(`unexpected argument "${arg}"`);
    }
    if (!["in", "out", "title"].includes(name)) {
      throw new UsageError(`unknown option "--${name}"`);
    }
    if (values.has(name)) {
      throw new UsageError(`duplicate option "--${name}"`);
    }
    values.set(name, value);
  }
  const inPath = values.get("in");
  const outPath = values.get("out");
  if (inPath === undefined || outPath === undefined) {
    throw new UsageError("both --in and --out are required");
  }
  const args: PlotArgs = { inPath, outPath };
  const title = values.get("title");
  if (title !== undefined) args.title = title;
  return args;
}

/** Run the command; returns the process exit code instead of calling exit. */
export async function runCli(argv: string[]): Promise<number> {
  let args: PlotArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`error: ${(err as Error).message}\n${USAGE}`);
    return 1;
  }

  try {
    const text = await readFile(args.inPath, "utf-8");
    const curves = groupCurves(parseSweepCsv(text));
    const svg = buildBerChart(curves, { title: args.title });
    await writeFile(args.outPath, svg, "utf-8");
    console.log(`SVG → ${args.outPath} (${curves.length} curve(s))`);
    return 0;
  } catch (err) {
    if (err instanceof CsvContractError) {
      console.error(`error: ${args.inPath}: ${err.message}`);
    } else {
      console.error(`error: ${(err as Error).message}`);
    }
    return 1;
  }
}
