#!/usr/bin/env node
/** plot --spec <json> --out <svg> */
import { writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { CsvSchemaError } from "./csv.js";
import { PlotSpecError, loadPlotSpec } from "./plotspec.js";
import { renderSpec } from "./render.js";

export function main(argv: string[]): number {
  const args = yargs(argv)
    .option("spec", { type: "string", demandOption: true, describe: "plot spec JSON" })
    .option("out", { type: "string", demandOption: true, describe: "output .svg path" })
    .strict()
    .parseSync();
  if (!args.out.endsWith(".svg")) {
    console.error("only SVG output is supported; use an .svg path");
    return 1;
  }
  try {
    const svg = renderSpec(loadPlotSpec(args.spec));
    writeFileSync(args.out, svg, "utf-8");
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    if (err instanceof CsvSchemaError || err instanceof PlotSpecError || err instanceof Error) {
      console.error(err.message);
      return 1;
    }
    throw err;
  }
}

process.exitCode = main(hideBin(process.argv));
