#!/usr/bin/env node
/**
 * render --input plotdata.json --scatter out.svg --dist out.png [--raw-cr]
 *
 * Reads the pipeline's plot-data document and draws the tier scatter
 * and/or the violin+swarm distribution panel. Output format follows the
 * file extension (.svg or .png). Exit codes: 0 ok, 2 bad input.
 */

import { readFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { renderDistributions } from "./distributions.js";
import { writeImage } from "./output.js";
import { renderScatter } from "./scatter.js";
import { DocumentError, validateDocument } from "./types.js";

async function main(): Promise<number> {
  const argv = await yargs(hideBin(process.argv))
    .usage("render --input plotdata.json [--scatter FILE] [--dist FILE] [--raw-cr]")
    .option("input", { type: "string", demandOption: true, describe: "plotdata.json from the pipeline" })
    .option("scatter", { type: "string", describe: "output file for the PIC/ACB tier scatter" })
    .option("dist", { type: "string", describe: "output file for the violin+swarm panel" })
    .option("raw-cr", { type: "boolean", default: false, describe: "plot raw confidence ratios instead of ln" })
    .strict()
    .help()
    .parse();

  if (!argv.scatter && !argv.dist) {
    process.stderr.write("error: nothing to do; pass --scatter and/or --dist\n");
    return 2;
  }

  let raw: unknown;
  try {
    raw = JSON.parse(readFileSync(argv.input, "utf-8"));
  } catch (err) {
    process.stderr.write(`error: cannot read ${argv.input}: ${(err as Error).message}\n`);
    return 2;
  }

  try {
    const doc = validateDocument(raw);
    if (argv.scatter) {
      await writeImage(argv.scatter, renderScatter(doc));
      process.stderr.write(`wrote ${argv.scatter}\n`);
    }
    if (argv.dist) {
      await writeImage(argv.dist, renderDistributions(doc, { rawCr: argv["raw-cr"] }));
      process.stderr.write(`wrote ${argv.dist}\n`);
    }
  } catch (err) {
    if (err instanceof DocumentError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 2;
    }
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
  return 0;
}

main().then((code) => {
  process.exitCode = code;
});
