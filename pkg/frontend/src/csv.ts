/**
 * Readers for the experiment output files.
 *
 * Trial CSV: header `trial,iter,evals,best_safe_f,gap,unsafe,delta,term`,
 * one row per iteration (1-based), termination reason only on the final row.
 * Theta trace CSV: header `iter,theta_0,...`, iteration 0 included.
 * Non-finite floats are spelled `inf`, `-inf`, `nan`.
 */

export const TRIAL_HEADER = "trial,iter,evals,best_safe_f,gap,unsafe,delta,term";

export interface TrialSeries {
  trial: number;
  iterations: number[];
  evals: number[];
  bestSafeF: number[];
  gap: number[];
  unsafe: number[];
  delta: number[];
  termination: string;
}

export interface ThetaTrace {
  d: number;
  iterations: number[];
  theta: number[][]; // one row of length d per recorded iteration
}

export function parseNumber(token: string, where: string): number {
  if (token === "inf") return Infinity;
  if (token === "-inf") return -Infinity;
  if (token === "nan") return NaN;
  const value = Number(token);
  if (token === "" || !Number.isFinite(value)) {
    throw new Error(`${where}: malformed number ${JSON.stringify(token)}`);
  }
  return value;
}

function dataLines(text: string): string[] {
  return text.split("\n").filter((line) => line.length > 0);
}

export function parseTrialCsv(text: string, path = "<trial csv>"): TrialSeries {
  const lines = dataLines(text);
  if (lines.length === 0) throw new Error(`${path}: empty file`);
  if (lines[0] !== TRIAL_HEADER) {
    throw new Error(`${path}:1: expected header ${TRIAL_HEADER}`);
  }
  if (lines.length === 1) throw new Error(`${path}: no data rows`);

  const series: TrialSeries = {
    trial: -1, iterations: [], evals: [], bestSafeF: [],
    gap: [], unsafe: [], delta: [], termination: "",
  };
  for (let i = 1; i < lines.length; i++) {
    const where = `${path}:${i + 1}`;
    const cols = lines[i].split(",");
    if (cols.length !== 8) {
      throw new Error(`${where}: expected 8 columns, got ${cols.length}`);
    }
    const trial = parseNumber(cols[0], where);
    if (series.trial === -1) series.trial = trial;
    else if (trial !== series.trial) {
      throw new Error(`${where}: mixed trial ids (${trial} vs ${series.trial})`);
    }
    const last = i === lines.length - 1;
    if (cols[7] !== "" && !last) {
      throw new Error(`${where}: termination reason before the final row`);
    }
    if (last) {
      if (cols[7] === "") throw new Error(`${where}: final row has no termination reason`);
      series.termination = cols[7];
    }
    series.iterations.push(parseNumber(cols[1], where));
    series.evals.push(parseNumber(cols[2], where));
    series.bestSafeF.push(parseNumber(cols[3], where));
    series.gap.push(parseNumber(cols[4], where));
    series.unsafe.push(parseNumber(cols[5], where));
    series.delta.push(parseNumber(cols[6], where));
  }
  return series;
}

export function parseThetaCsv(text: string, path = "<theta csv>"): ThetaTrace {
  const lines = dataLines(text);
  if (lines.length === 0) throw new Error(`${path}: empty file`);
  const header = lines[0].split(",");
  const d = header.length - 1;
  if (header[0] !== "iter" || d < 1
      || !header.slice(1).every((name, i) => name === `theta_${i}`)) {
    throw new Error(`${path}:1: expected header iter,theta_0,...`);
  }
  if (lines.length === 1) throw new Error(`${path}: no data rows`);

  const trace: ThetaTrace = { d, iterations: [], theta: [] };
  for (let i = 1; i < lines.length; i++) {
    const where = `${path}:${i + 1}`;
    const cols = lines[i].split(",");
    if (cols.length !== d + 1) {
      throw new Error(`${where}: expected ${d + 1} columns, got ${cols.length}`);
    }
    trace.iterations.push(parseNumber(cols[0], where));
    trace.theta.push(cols.slice(1).map((tok) => parseNumber(tok, where)));
  }
  return trace;
}
