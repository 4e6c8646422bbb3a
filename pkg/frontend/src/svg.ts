/** Minimal SVG assembly: linear scales, polylines, axes, text. */

export interface Scale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  scale.range = range;
  return scale;
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo)) return [0, 1];
  return lo === hi ? [lo - 0.5, hi + 0.5] : [lo, hi];
}

export function escapeAttr(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export interface SeriesAttrs {
  /** machine-readable copies of the plotted values, for lossless extraction */
  name: string;
  x: number[];
  y: number[];
}

export function polyline(
  xs: number[],
  ys: number[],
  sx: Scale,
  sy: Scale,
  style: string,
  data?: SeriesAttrs,
): string {
  const points = xs.map((x, i) => `${sx(x).toFixed(2)},${sy(ys[i]!).toFixed(2)}`).join(" ");
  const attrs = data
    ? ` data-series="${escapeAttr(data.name)}"` +
      ` data-x="${escapeAttr(JSON.stringify(data.x))}"` +
      ` data-y="${escapeAttr(JSON.stringify(data.y))}"`
    : "";
  return `<polyline fill="none" ${style} points="${points}"${attrs}/>`;
}

export function bandPolygon(
  xs: number[],
  low: number[],
  high: number[],
  sx: Scale,
  sy: Scale,
  style: string,
): string {
  const forward = xs.map((x, i) => `${sx(x).toFixed(2)},${sy(low[i]!).toFixed(2)}`);
  const back = [...xs]
    .reverse()
    .map((x, i) => `${sx(x).toFixed(2)},${sy(high[xs.length - 1 - i]!).toFixed(2)}`);
  return `<polygon ${style} points="${forward.concat(back).join(" ")}"/>`;
}

export function ticks(domain: [number, number], count: number): number[] {
  const [lo, hi] = domain;
  const step = (hi - lo) / Math.max(count - 1, 1);
  return Array.from({ length: count }, (_, i) => lo + i * step);
}

export function axes(
  sx: Scale,
  sy: Scale,
  xLabel: string,
  yLabel: string,
  xTicks: number[],
  yTicks: number[],
): string {
  const [x0, x1] = sx.range;
  const [y0, y1] = sy.range; // y0 is the bottom (larger pixel value)
  const parts: string[] = [];
  parts.push(
    `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="#333" stroke-width="1"/>`,
  );
  parts.push(
    `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="#333" stroke-width="1"/>`,
  );
  for (const t of xTicks) {
    const px = sx(t);
    parts.push(`<line x1="${px.toFixed(2)}" y1="${y0}" x2="${px.toFixed(2)}" y2="${y0 + 4}" stroke="#333"/>`);
    parts.push(
      `<text x="${px.toFixed(2)}" y="${y0 + 16}" font-size="10" text-anchor="middle">${formatTick(t)}</text>`,
    );
  }
  for (const t of yTicks) {
    const py = sy(t);
    parts.push(`<line x1="${x0 - 4}" y1="${py.toFixed(2)}" x2="${x0}" y2="${py.toFixed(2)}" stroke="#333"/>`);
    parts.push(
      `<text x="${x0 - 6}" y="${(py + 3).toFixed(2)}" font-size="10" text-anchor="end">${formatTick(t)}</text>`,
    );
  }
  const midX = (x0 + x1) / 2;
  const midY = (y0 + y1) / 2;
  parts.push(`<text x="${midX}" y="${y0 + 30}" font-size="11" text-anchor="middle">${escapeAttr(xLabel)}</text>`);
  parts.push(
    `<text x="${x0 - 34}" y="${midY}" font-size="11" text-anchor="middle" transform="rotate(-90 ${x0 - 34} ${midY})">${escapeAttr(yLabel)}</text>`,
  );
  return parts.join("\n");
}

function formatTick(t: number): string {
  const rounded = Math.round(t * 1000) / 1000;
  return String(rounded);
}

export function document(width: number, height: number, body: string, title: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<title>${escapeAttr(title)}</title>`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    body,
    `</svg>`,
  ].join("\n");
}

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#e377c2",
  "#17becf",
  "#7f7f7f",
];
