/**
 * Trajectory chart: per-step mean line plus quantile bands, from a
 * `sim_<method>.csv` file (columns: step, method, mean, q10, q25, ...).
 *
 * Quantile columns are discovered by name (q<percent>); the outermost pair
 * is drawn as a light band, inner pairs darker, and an unpaired middle
 * quantile as a dashed line. Plotted values are embedded verbatim in
 * data-x / data-y attributes so nothing is lost to pixel rounding.
 */

import { CsvError, CsvTable, numericColumn, parseCsv, requireColumns, stringColumn } from "./csv";
import * as svg from "./svg";

export interface TrajectorySeries {
  method: string;
  steps: number[];
  mean: number[];
  /** quantile column name -> values, e.g. "q10" -> [...] */
  quantiles: Map<string, number[]>;
}

export function extractTrajectory(table: CsvTable): TrajectorySeries {
  requireColumns(table, ["step", "method", "mean"]);
  const methods = new Set(stringColumn(table, "method"));
  if (methods.size !== 1) {
    throw new CsvError(
      `trajectory input must hold one method, found: ${[...methods].join(", ")}`,
    );
  }
  const quantiles = new Map<string, number[]>();
  for (const name of table.header) {
    if (/^q\d+$/.test(name)) {
      quantiles.set(name, numericColumn(table, name));
    }
  }
  return {
    method: [...methods][0]!,
    steps: numericColumn(table, "step"),
    mean: numericColumn(table, "mean"),
    quantiles,
  };
}

export function parseTrajectory(text: string): TrajectorySeries {
  return extractTrajectory(parseCsv(text));
}

const WIDTH = 640;
const HEIGHT = 400;
const MARGIN = { left: 56, right: 16, top: 24, bottom: 44 };

export function renderTrajectory(series: TrajectorySeries): string {
  const quantNames = [...series.quantiles.keys()].sort(
    (a, b) => Number(a.slice(1)) - Number(b.slice(1)),
  );
  const allValues = series.mean.concat(...quantNames.map((q) => series.quantiles.get(q)!));
  const sx = svg.linearScale(svg.extent(series.steps), [MARGIN.left, WIDTH - MARGIN.right]);
  const sy = svg.linearScale(svg.extent(allValues), [HEIGHT - MARGIN.bottom, MARGIN.top]);

  const parts: string[] = [];
  // pair outermost quantiles inward; leftover middle becomes a dashed line
  let lo = 0;
  let hi = quantNames.length - 1;
  let shade = 0.16;
  while (lo < hi) {
    const low = series.quantiles.get(quantNames[lo]!)!;
    const high = series.quantiles.get(quantNames[hi]!)!;
    parts.push(
      svg.bandPolygon(
        series.steps,
        low,
        high,
        sx,
        sy,
        `fill="#1f77b4" fill-opacity="${shade.toFixed(2)}" stroke="none"`,
      ),
    );
    lo += 1;
    hi -= 1;
    shade += 0.12;
  }
  for (const name of quantNames) {
    const dashed = lo === hi && name === quantNames[lo];
    parts.push(
      svg.polyline(
        series.steps,
        series.quantiles.get(name)!,
        sx,
        sy,
        `stroke="#1f77b4" stroke-width="1" stroke-opacity="0.8"${dashed ? ' stroke-dasharray="4 3"' : ""}`,
        { name, x: series.steps, y: series.quantiles.get(name)! },
      ),
    );
  }
  parts.push(
    svg.polyline(series.steps, series.mean, sx, sy, `stroke="#d62728" stroke-width="2"`, {
      name: "mean",
      x: series.steps,
      y: series.mean,
    }),
  );
  parts.push(
    svg.axes(sx, sy, "samples in leaf", "score", svg.ticks(sx.domain, 6), svg.ticks(sy.domain, 5)),
  );
  parts.push(
    `<text x="${MARGIN.left}" y="14" font-size="12" font-weight="bold">${svg.escapeAttr(series.method)}</text>`,
  );
  return svg.document(WIDTH, HEIGHT, parts.join("\n"), `trajectory: ${series.method}`);
}

/** Read back the values embedded by renderTrajectory (exact, not pixels). */
export function extractEmbeddedSeries(svgText: string): Map<string, { x: number[]; y: number[] }> {
  const out = new Map<string, { x: number[]; y: number[] }>();
  const pattern = /data-series="([^"]*)" data-x="([^"]*)" data-y="([^"]*)"/g;
  for (const match of svgText.matchAll(pattern)) {
    const decode = (s: string) =>
      s.replace(/&quot;/g, '"').replace(/&#39;/g, "'").replace(/&lt;/g, "<").replace(/&gt;/g, ">").replace(/&amp;/g, "&");
    out.set(decode(match[1]!), {
      x: JSON.parse(decode(match[2]!)) as number[],
      y: JSON.parse(decode(match[3]!)) as number[],
    });
  }
  return out;
}
