/**
 * Round-trip against real files produced by the Python CLI (committed as
 * fixtures): every plotted number must equal the CSV text parsed as a
 * float, with no reformatting anywhere in the pipeline.
 */

import assert from "node:assert/strict";
import { readFileSync } from "node:fs";
import { join } from "node:path";
import { test } from "node:test";

import { parseCsv } from "../src/csv";
import { parseRanks, renderRanks } from "../src/ranks";
import { extractEmbeddedSeries, parseTrajectory, renderTrajectory } from "../src/trajectory";

const FIXTURES = join(__dirname, "..", "..", "test", "fixtures");

function fixture(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf8");
}

test("sim CSV from the engine round-trips through the rendered SVG", () => {
  const text = fixture("sim_eva.csv");
  const table = parseCsv(text);
  const series = parseTrajectory(text);
  const embedded = extractEmbeddedSeries(renderTrajectory(series));

  const meanIdx = table.header.indexOf("mean");
  const rawMeans = table.rows.map((row) => Number(row[meanIdx]));
  assert.deepEqual(embedded.get("mean")!.y, rawMeans);

  for (const q of ["q10", "q25", "q75", "q90"]) {
    const idx = table.header.indexOf(q);
    const raw = table.rows.map((row) => Number(row[idx]));
    assert.deepEqual(embedded.get(q)!.y, raw, q);
  }
  // the engine's config echo is carried along for provenance
  assert.equal((table.config as { mode: string }).mode, "ensemble");
});

test("ranks CSV from the engine round-trips through the rendered SVG", () => {
  const text = fixture("ranks.csv");
  const table = parseCsv(text);
  const embedded = extractEmbeddedSeries(renderRanks(parseRanks(text)));

  const byMethod = new Map<string, Array<[number, number]>>();
  for (const row of table.rows) {
    const method = row[0]!;
    if (!byMethod.has(method)) byMethod.set(method, []);
    byMethod.get(method)!.push([Number(row[1]), Number(row[2])]);
  }
  for (const [method, points] of byMethod) {
    points.sort((a, b) => a[0] - b[0]);
    assert.deepEqual(
      embedded.get(method)!.y,
      points.map((p) => p[1]),
      method,
    );
  }
});
