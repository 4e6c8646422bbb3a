/**
 * Render rdtcombine CSV outputs as SVG.
 *
 *   node dist/src/cli.js trajectory <sim_method.csv> <out.svg>
 *   node dist/src/cli.js ranks <ranks.csv> <out.svg>
 */

import { readFileSync, writeFileSync } from "node:fs";

import { CsvError } from "./csv";
import { parseRanks, renderRanks } from "./ranks";
import { parseTrajectory, renderTrajectory } from "./trajectory";

export function main(argv: string[]): number {
  const [kind, input, output] = argv;
  if (!kind || !input || !output || !["trajectory", "ranks"].includes(kind)) {
    process.stderr.write(
      "usage: cli.js trajectory <sim.csv> <out.svg> | cli.js ranks <ranks.csv> <out.svg>\n",
    );
    return 1;
  }
  let text: string;
  try {
    text = readFileSync(input, "utf8");
  } catch (err) {
    process.stderr.write(`cannot read ${input}: ${(err as Error).message}\n`);
    return 1;
  }
  let rendered: string;
  try {
    rendered =
      kind === "trajectory"
        ? renderTrajectory(parseTrajectory(text))
        : renderRanks(parseRanks(text));
  } catch (err) {
    if (err instanceof CsvError) {
      process.stderr.write(`${input}: ${err.message}\n`);
      return 1;
    }
    throw err;
  }
  writeFileSync(output, rendered, "utf8");
  process.stdout.write(`wrote ${output}\n`);
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
