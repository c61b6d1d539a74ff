#!/usr/bin/env node
/**
 * Render experiment outputs to SVG.
 *
 *   node dist/cli.js convergence --in <cell-dir> --out <file.svg>
 *   node dist/cli.js theta --in <trial_theta.csv> --out <file.svg>
 *
 * `convergence` reads every trial_*.csv in the cell directory (theta traces
 * excluded); `theta` reads a single trace file.
 */

import { readdirSync, readFileSync, realpathSync, writeFileSync } from "node:fs";
import { basename, join } from "node:path";
import { fileURLToPath } from "node:url";

import { parseThetaCsv, parseTrialCsv, type TrialSeries } from "./csv.js";
import { buildConvergenceSvg } from "./convergence.js";
import { buildThetaSvg } from "./theta.js";

const USAGE = `usage:
  plot convergence --in <cell-dir> --out <file.svg>
  plot theta --in <trial_theta.csv> --out <file.svg>`;

function parseArgs(argv: string[]): { inPath: string; outPath: string } {
  let inPath = "";
  let outPath = "";
  for (let i = 0; i < argv.length; i += 2) {
    const value = argv[i + 1];
    if (value === undefined) throw new Error(`missing value for ${argv[i]}`);
    if (argv[i] === "--in") inPath = value;
    else if (argv[i] === "--out") outPath = value;
    else throw new Error(`unknown option ${argv[i]}`);
  }
  if (!inPath || !outPath) throw new Error("both --in and --out are required");
  return { inPath, outPath };
}

function loadCellTrials(dir: string): TrialSeries[] {
  const names = readdirSync(dir)
    .filter((name) => /^trial_\d+\.csv$/.test(name))
    .sort();
  if (names.length === 0) throw new Error(`no trial_*.csv files in ${dir}`);
  return names.map((name) => {
    const path = join(dir, name);
    return parseTrialCsv(readFileSync(path, "utf8"), path);
  });
}

export function main(argv: string[]): number {
  try {
    const [command, ...rest] = argv;
    if (command === "convergence") {
      const { inPath, outPath } = parseArgs(rest);
      const svg = buildConvergenceSvg(loadCellTrials(inPath), basename(inPath));
      writeFileSync(outPath, svg);
      console.log(outPath);
    } else if (command === "theta") {
      const { inPath, outPath } = parseArgs(rest);
      const trace = parseThetaCsv(readFileSync(inPath, "utf8"), inPath);
      writeFileSync(outPath, buildThetaSvg(trace, basename(inPath)));
      console.log(outPath);
    } else {
      console.error(USAGE);
      return 2;
    }
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

function isDirectInvocation(): boolean {
  if (!process.argv[1]) return false;
  try {
    return realpathSync(process.argv[1]) === fileURLToPath(import.meta.url);
  } catch {
    return false;
  }
}

if (isDirectInvocation()) {
  process.exit(main(process.argv.slice(2)));
}
