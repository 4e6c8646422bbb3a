import assert from "node:assert/strict";
import { test } from "node:test";

import { CsvError } from "../src/csv";
import { extractEmbeddedSeries, parseTrajectory, renderTrajectory } from "../src/trajectory";

function sampleCsv(): { text: string; mean: number[]; q10: number[]; q90: number[] } {
  const steps = [1, 2, 3, 4, 5];
  const mean = [0.1, 0.30000000000000004, 0.21, 0.2499999999999999, 0.25];
  const q10 = [-0.5, -0.1, 0.0, 0.05, 0.1];
  const q90 = [0.5, 0.5, 0.45, 0.42, 0.4];
  const lines = ['# config: {"p_pos": 0.75}', "step,method,mean,q10,q90"];
  for (let i = 0; i < steps.length; i++) {
    lines.push(`${steps[i]},prob,${mean[i]},${q10[i]},${q90[i]}`);
  }
  return { text: lines.join("\n") + "\n", mean, q10, q90 };
}

test("extracted series equals the CSV values exactly", () => {
  const sample = sampleCsv();
  const series = parseTrajectory(sample.text);
  assert.equal(series.method, "prob");
  assert.deepEqual(series.steps, [1, 2, 3, 4, 5]);
  assert.deepEqual(series.mean, sample.mean);
  assert.deepEqual(series.quantiles.get("q10"), sample.q10);
  assert.deepEqual(series.quantiles.get("q90"), sample.q90);
});

test("rendered SVG embeds the plotted values losslessly", () => {
  const sample = sampleCsv();
  const series = parseTrajectory(sample.text);
  const rendered = renderTrajectory(series);
  assert.ok(rendered.startsWith("<svg"));
  const embedded = extractEmbeddedSeries(rendered);
  assert.deepEqual(embedded.get("mean")!.y, sample.mean);
  assert.deepEqual(embedded.get("mean")!.x, [1, 2, 3, 4, 5]);
  assert.deepEqual(embedded.get("q10")!.y, sample.q10);
  assert.deepEqual(embedded.get("q90")!.y, sample.q90);
});

test("band chart renders mean plus all quantile curves", () => {
  const series = parseTrajectory(sampleCsv().text);
  const rendered = renderTrajectory(series);
  const polylines = rendered.match(/<polyline /g) ?? [];
  assert.equal(polylines.length, 1 + series.quantiles.size);
  assert.ok(rendered.includes("<polygon"), "expected a quantile band polygon");
});

test("a lone median quantile becomes a dashed line, no band", () => {
  const text = "step,method,mean,q50\n1,vote,0.0,0.0\n2,vote,0.1,0.05\n";
  const rendered = renderTrajectory(parseTrajectory(text));
  assert.ok(rendered.includes("stroke-dasharray"));
  assert.ok(!rendered.includes("<polygon"));
});

test("missing required columns are named", () => {
  assert.throws(
    () => parseTrajectory("step,value\n1,0.5\n2,0.4\n"),
    (err: Error) => err instanceof CsvError && /method, mean/.test(err.message),
  );
});

test("mixed methods in one file are rejected", () => {
  assert.throws(
    () => parseTrajectory("step,method,mean\n1,prob,0.1\n1,vote,0.2\n"),
    /one method/,
  );
});

test("empty CSV yields an error, not an image", () => {
  assert.throws(() => parseTrajectory("step,method,mean\n"), /no data rows/);
});
