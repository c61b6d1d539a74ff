/**
 * Convergence chart for one experiment cell: optimality gap (median line,
 * interquartile band) over iterations, with a lower panel for the cumulative
 * unsafe-evaluation count. The final median unsafe count is written both as
 * a visible annotation and as a data-final-unsafe-median attribute.
 */

import type { TrialSeries } from "./csv.js";
import { carryForward, formatValue, median, quartileBands } from "./stats.js";
import {
  bandPath, makeLinearScale, polylinePoints, renderXAxis, renderYAxis,
  svgDoc, ticks,
} from "./svg.js";

// ── Layout ─────────────────────────────────────────────────────────────────

const W = 720;
const GAP_PANEL = { top: 34, bottom: 190, left: 60, right: 16 };
const UNSAFE_PANEL = { top: 230, bottom: 46, left: 60, right: 16 };
const H = 400;

function finiteExtent(rows: number[][]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const row of rows) {
    for (const v of row) {
      if (!Number.isFinite(v)) continue;
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (lo > hi) return [0, 1]; // nothing finite to show
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  return [lo, hi];
}

export function buildConvergenceSvg(trials: TrialSeries[], title = ""): string {
  if (trials.length === 0) throw new Error("no trials to plot");
  const tMax = Math.max(...trials.map((s) => s.iterations[s.iterations.length - 1]));
  const iters = Array.from({ length: tMax }, (_, i) => i + 1);
  const gap = carryForward(trials.map((s) => s.gap), tMax);
  const unsafe = carryForward(trials.map((s) => s.unsafe), tMax);
  const gapBands = quartileBands(gap);
  const unsafeBands = quartileBands(unsafe);
  const finalUnsafeMedian = median(unsafe.map((row) => row[tMax - 1]));

  const sx = makeLinearScale([1, Math.max(tMax, 2)], [GAP_PANEL.left, W - GAP_PANEL.right]);
  const syGap = makeLinearScale(finiteExtent([gapBands.q25, gapBands.q75, gapBands.median]),
    [H - GAP_PANEL.bottom, GAP_PANEL.top]);
  const syUnsafe = makeLinearScale(finiteExtent([unsafeBands.q25, unsafeBands.q75, unsafeBands.median]),
    [H - UNSAFE_PANEL.bottom, UNSAFE_PANEL.top]);

  const parts: string[] = [];
  if (title) {
    parts.push(`<text x="${GAP_PANEL.left}" y="18" font-size="13" fill="#111" font-weight="bold">${title}</text>`);
  }

  // gap panel: IQR band under the median line
  const gapBand = bandPath(iters, gapBands.q25, gapBands.q75, sx, syGap);
  if (gapBand) parts.push(`<path d="${gapBand}" fill="#4477aa" fill-opacity="0.25" stroke="none"/>`);
  for (const seg of polylinePoints(iters, gapBands.median, sx, syGap)) {
    parts.push(`<polyline points="${seg}" fill="none" stroke="#114488" stroke-width="1.6"/>`);
  }
  parts.push(renderYAxis(syGap, GAP_PANEL.left, ticks(syGap.domain[0], syGap.domain[1], 4)));
  parts.push(`<text x="14" y="${(GAP_PANEL.top + H - GAP_PANEL.bottom) / 2}" font-size="11" fill="#222" transform="rotate(-90 14 ${(GAP_PANEL.top + H - GAP_PANEL.bottom) / 2})" text-anchor="middle">gap to optimum</text>`);

  // unsafe panel
  const unsafeBand = bandPath(iters, unsafeBands.q25, unsafeBands.q75, sx, syUnsafe);
  if (unsafeBand) parts.push(`<path d="${unsafeBand}" fill="#cc6677" fill-opacity="0.25" stroke="none"/>`);
  for (const seg of polylinePoints(iters, unsafeBands.median, sx, syUnsafe)) {
    parts.push(`<polyline points="${seg}" fill="none" stroke="#882233" stroke-width="1.6"/>`);
  }
  parts.push(renderYAxis(syUnsafe, UNSAFE_PANEL.left, ticks(syUnsafe.domain[0], syUnsafe.domain[1], 3)));
  parts.push(renderXAxis(sx, H - UNSAFE_PANEL.bottom, ticks(1, Math.max(tMax, 2), 5), "iteration"));
  parts.push(`<text x="14" y="${(UNSAFE_PANEL.top + H - UNSAFE_PANEL.bottom) / 2}" font-size="11" fill="#222" transform="rotate(-90 14 ${(UNSAFE_PANEL.top + H - UNSAFE_PANEL.bottom) / 2})" text-anchor="middle">unsafe evals</text>`);

  // annotation: the headline number a reader should take away
  const note = `final median unsafe: ${formatValue(finalUnsafeMedian)}`;
  parts.push(`<text x="${W - GAP_PANEL.right}" y="18" text-anchor="end" font-size="12" fill="#882233">${note}</text>`);

  return svgDoc(W, H, {
    "data-final-unsafe-median": formatValue(finalUnsafeMedian),
    "data-trials": String(trials.length),
    "data-iterations": String(tMax),
  }, parts.join("\n"));
}
