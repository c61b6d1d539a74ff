/**
 * Small hand-rolled SVG helpers: linear scales, polylines, quartile bands,
 * axes. Everything returns strings; the callers assemble the document.
 */

export interface Scale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

export function makeLinearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0;
  const scale = ((value: number) =>
    span === 0 ? (r0 + r1) / 2 : r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  scale.range = range;
  return scale;
}

export function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const r2 = (value: number) => Math.round(value * 100) / 100;

/** points="" attribute value; non-finite y values split the line. */
export function polylinePoints(xs: number[], ys: number[], sx: Scale, sy: Scale): string[] {
  const segments: string[] = [];
  let current: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    if (Number.isFinite(ys[i])) {
      current.push(`${r2(sx(xs[i]))},${r2(sy(ys[i]))}`);
    } else if (current.length > 0) {
      segments.push(current.join(" "));
      current = [];
    }
  }
  if (current.length > 0) segments.push(current.join(" "));
  return segments;
}

/** Closed path tracing hi forward and lo backward (an IQR band). */
export function bandPath(xs: number[], lo: number[], hi: number[], sx: Scale, sy: Scale): string {
  const finite = xs.map((_, i) => Number.isFinite(lo[i]) && Number.isFinite(hi[i]));
  const forward: string[] = [];
  const backward: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    if (!finite[i]) continue;
    forward.push(`${r2(sx(xs[i]))} ${r2(sy(hi[i]))}`);
    backward.unshift(`${r2(sx(xs[i]))} ${r2(sy(lo[i]))}`);
  }
  if (forward.length === 0) return "";
  return `M ${forward.join(" L ")} L ${backward.join(" L ")} Z`;
}

export function ticks(lo: number, hi: number, count: number): number[] {
  if (!(Number.isFinite(lo) && Number.isFinite(hi)) || lo === hi) return [lo];
  const out: number[] = [];
  for (let i = 0; i <= count; i++) out.push(lo + ((hi - lo) * i) / count);
  return out;
}

export function tickLabel(value: number): string {
  return String(Number(value.toPrecision(3)));
}

export function renderYAxis(sy: Scale, x: number, values: number[]): string {
  const parts = [
    `<line x1="${x}" y1="${r2(sy.range[0])}" x2="${x}" y2="${r2(sy.range[1])}" stroke="#444"/>`,
  ];
  for (const v of values) {
    const y = r2(sy(v));
    parts.push(`<line x1="${x - 4}" y1="${y}" x2="${x}" y2="${y}" stroke="#444"/>`);
    parts.push(`<text x="${x - 7}" y="${y + 3.5}" text-anchor="end" font-size="10" fill="#444">${esc(tickLabel(v))}</text>`);
  }
  return parts.join("\n");
}

export function renderXAxis(sx: Scale, y: number, values: number[], label: string): string {
  const parts = [
    `<line x1="${r2(sx.range[0])}" y1="${y}" x2="${r2(sx.range[1])}" y2="${y}" stroke="#444"/>`,
  ];
  for (const v of values) {
    const x = r2(sx(v));
    parts.push(`<line x1="${x}" y1="${y}" x2="${x}" y2="${y + 4}" stroke="#444"/>`);
    parts.push(`<text x="${x}" y="${y + 15}" text-anchor="middle" font-size="10" fill="#444">${esc(tickLabel(v))}</text>`);
  }
  const mid = (sx.range[0] + sx.range[1]) / 2;
  parts.push(`<text x="${r2(mid)}" y="${y + 30}" text-anchor="middle" font-size="11" fill="#222">${esc(label)}</text>`);
  return parts.join("\n");
}

export function svgDoc(width: number, height: number, attrs: Record<string, string>, body: string): string {
  const extra = Object.entries(attrs)
    .map(([key, value]) => ` ${key}="${esc(value)}"`)
    .join("");
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}"${extra}>\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n${body}\n</svg>\n`;
}
