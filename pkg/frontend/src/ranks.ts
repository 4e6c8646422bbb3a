/**
 * Rank chart: one line per method across leaf sizes, from a `ranks.csv`
 * file (columns: method, min_leaf, avg_rank). Rank 1 is best and is drawn
 * at the top (the y axis is inverted). Values are embedded per series for
 * lossless extraction.
 */

import { CsvError, CsvTable, numericColumn, parseCsv, requireColumns, stringColumn } from "./csv";
import * as svg from "./svg";

export interface RankSeries {
  method: string;
  leafSizes: number[];
  ranks: number[];
}

export function extractRanks(table: CsvTable): RankSeries[] {
  requireColumns(table, ["method", "min_leaf", "avg_rank"]);
  const methods = stringColumn(table, "method");
  const leaves = numericColumn(table, "min_leaf");
  const ranks = numericColumn(table, "avg_rank");
  const order: string[] = [];
  const grouped = new Map<string, Array<[number, number]>>();
  methods.forEach((method, i) => {
    if (!grouped.has(method)) {
      grouped.set(method, []);
      order.push(method);
    }
    grouped.get(method)!.push([leaves[i]!, ranks[i]!]);
  });
  return order.map((method) => {
    const points = grouped.get(method)!.slice().sort((a, b) => a[0] - b[0]);
    return {
      method,
      leafSizes: points.map((p) => p[0]),
      ranks: points.map((p) => p[1]),
    };
  });
}

export function parseRanks(text: string): RankSeries[] {
  const series = extractRanks(parseCsv(text));
  if (series.length === 0) {
    throw new CsvError("rank input holds no series");
  }
  return series;
}

const WIDTH = 640;
const HEIGHT = 420;
const MARGIN = { left: 56, right: 110, top: 24, bottom: 44 };

export function renderRanks(series: RankSeries[]): string {
  const allLeaves = series.flatMap((s) => s.leafSizes);
  const allRanks = series.flatMap((s) => s.ranks);
  const sx = svg.linearScale(svg.extent(allLeaves), [MARGIN.left, WIDTH - MARGIN.right]);
  // inverted: rank 1 (best) at the top
  const [rLo, rHi] = svg.extent(allRanks);
  const sy = svg.linearScale([rHi, rLo], [HEIGHT - MARGIN.bottom, MARGIN.top]);

  const parts: string[] = [];
  series.forEach((s, i) => {
    const color = svg.PALETTE[i % svg.PALETTE.length]!;
    parts.push(
      svg.polyline(s.leafSizes, s.ranks, sx, sy, `stroke="${color}" stroke-width="2"`, {
        name: s.method,
        x: s.leafSizes,
        y: s.ranks,
      }),
    );
    for (let p = 0; p < s.leafSizes.length; p++) {
      parts.push(
        `<circle cx="${sx(s.leafSizes[p]!).toFixed(2)}" cy="${sy(s.ranks[p]!).toFixed(2)}" r="2.5" fill="${color}"/>`,
      );
    }
    const legendY = MARGIN.top + 14 * i;
    parts.push(
      `<line x1="${WIDTH - MARGIN.right + 8}" y1="${legendY}" x2="${WIDTH - MARGIN.right + 24}" y2="${legendY}" stroke="${color}" stroke-width="2"/>`,
    );
    parts.push(
      `<text x="${WIDTH - MARGIN.right + 28}" y="${legendY + 3}" font-size="10">${svg.escapeAttr(s.method)}</text>`,
    );
  });
  const leafTicks = [...new Set(allLeaves)].sort((a, b) => a - b);
  parts.push(
    svg.axes(
      sx,
      sy,
      "minimum leaf size",
      "average rank (1 = best)",
      leafTicks,
      svg.ticks([rLo, rHi], 5),
    ),
  );
  return svg.document(WIDTH, HEIGHT, parts.join("\n"), "average ranks by leaf size");
}
