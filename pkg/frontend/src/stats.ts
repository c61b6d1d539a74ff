/**
 * Cross-trial aggregation, matching the producer's conventions: quartiles
 * use linear interpolation between order statistics (numpy's default), and
 * trials that terminated early are carried forward at their final values.
 */

export function percentile(values: number[], p: number): number {
  if (values.length === 0) throw new Error("percentile of empty list");
  if (values.some((v) => Number.isNaN(v))) return NaN;
  const sorted = [...values].sort((a, b) => a - b);
  const rank = (p / 100) * (sorted.length - 1);
  const lo = Math.floor(rank);
  const hi = Math.ceil(rank);
  if (lo === hi || sorted[lo] === sorted[hi]) return sorted[lo];
  return sorted[lo] + (rank - lo) * (sorted[hi] - sorted[lo]);
}

export function median(values: number[]): number {
  return percentile(values, 50);
}

/** Pad each row to tMax columns by repeating its final value. */
export function carryForward(rows: number[][], tMax: number): number[][] {
  return rows.map((row) => {
    if (row.length === 0) throw new Error("cannot carry forward an empty row");
    const out = row.slice(0, tMax);
    while (out.length < tMax) out.push(row[row.length - 1]);
    return out;
  });
}

export interface Bands {
  median: number[];
  q25: number[];
  q75: number[];
}

/** Per-column quartiles of a (trials x iterations) matrix. */
export function quartileBands(matrix: number[][]): Bands {
  if (matrix.length === 0) throw new Error("no rows to aggregate");
  const tMax = matrix[0].length;
  const bands: Bands = { median: [], q25: [], q75: [] };
  for (let t = 0; t < tMax; t++) {
    const column = matrix.map((row) => row[t]);
    bands.median.push(percentile(column, 50));
    bands.q25.push(percentile(column, 25));
    bands.q75.push(percentile(column, 75));
  }
  return bands;
}

/** Shortest decimal form, `inf`/`-inf`/`nan` spelled like the CSVs. */
export function formatValue(x: number): string {
  if (Number.isNaN(x)) return "nan";
  if (x === Infinity) return "inf";
  if (x === -Infinity) return "-inf";
  return String(Number(x.toPrecision(6)));
}
