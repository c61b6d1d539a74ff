/**
 * Distribution-parameter trace for a single trial: one line per component
 * of theta over recorded iterations, with dashed reference lines at the
 * clamp margins 1/d and 1-1/d. The observed min/max land in data-theta-min
 * and data-theta-max attributes.
 */

import type { ThetaTrace } from "./csv.js";
import {
  makeLinearScale, polylinePoints, renderXAxis, renderYAxis, svgDoc, ticks,
} from "./svg.js";

const W = 720;
const H = 320;
const MARGIN = { top: 30, bottom: 46, left: 56, right: 16 };

// qualitative palette, cycled when d exceeds its length
const COLORS = [
  "#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee",
  "#aa3377", "#bbbbbb", "#222255", "#225555", "#553311",
];

export function buildThetaSvg(trace: ThetaTrace, title = ""): string {
  const { d, iterations, theta } = trace;
  if (iterations.length === 0) throw new Error("empty trace");

  let lo = Infinity;
  let hi = -Infinity;
  for (const row of theta) {
    for (const v of row) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }

  const sx = makeLinearScale(
    [iterations[0], Math.max(iterations[iterations.length - 1], iterations[0] + 1)],
    [MARGIN.left, W - MARGIN.right]);
  const sy = makeLinearScale([0, 1], [H - MARGIN.bottom, MARGIN.top]);

  const parts: string[] = [];
  if (title) {
    parts.push(`<text x="${MARGIN.left}" y="18" font-size="13" fill="#111" font-weight="bold">${title}</text>`);
  }

  for (const bound of [1 / d, 1 - 1 / d]) {
    const y = Math.round(sy(bound) * 100) / 100;
    parts.push(`<line x1="${MARGIN.left}" y1="${y}" x2="${W - MARGIN.right}" y2="${y}" stroke="#999" stroke-dasharray="4 3"/>`);
  }

  for (let i = 0; i < d; i++) {
    const series = theta.map((row) => row[i]);
    for (const seg of polylinePoints(iterations, series, sx, sy)) {
      parts.push(`<polyline points="${seg}" fill="none" stroke="${COLORS[i % COLORS.length]}" stroke-width="1.3" stroke-opacity="0.85"/>`);
    }
  }

  parts.push(renderYAxis(sy, MARGIN.left, ticks(0, 1, 4)));
  parts.push(renderXAxis(sx, H - MARGIN.bottom,
    ticks(sx.domain[0], sx.domain[1], 5), "iteration"));
  parts.push(`<text x="14" y="${(MARGIN.top + H - MARGIN.bottom) / 2}" font-size="11" fill="#222" transform="rotate(-90 14 ${(MARGIN.top + H - MARGIN.bottom) / 2})" text-anchor="middle">theta</text>`);

  return svgDoc(W, H, {
    "data-theta-min": String(lo),
    "data-theta-max": String(hi),
    "data-components": String(d),
  }, parts.join("\n"));
}
