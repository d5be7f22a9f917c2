#!/usr/bin/env node
/**
 * Initial vs final parameter box on 2-D projections, with the true values.
 *
 *   node dist/plot-box-evolution.js RUN_DIR [--out file.svg]
 *
 * A run without identification has nothing to show; that is reported as a
 * message and a success exit, with no image written.
 */

import process from "node:process";

import { buildBoxEvolutionOption } from "./charts";
import { parsePlotArgs } from "./cli";
import { loadRun } from "./data";
import { renderToSvg, writeSvg } from "./render";

export function main(argv: string[]): number {
  const args = parsePlotArgs(argv, "box-evolution.svg");
  if (typeof args === "string") {
    console.error(`usage error: ${args}`);
    return 2;
  }
  if (args.dirs.length !== 1) {
    console.error("usage error: box evolution takes exactly one run directory");
    return 2;
  }
  try {
    const run = loadRun(args.dirs[0]);
    if (!run.summary.config.smid_enabled) {
      console.log(`run ${run.dir} has identification off: no box evolution to plot`);
      return 0;
    }
    const svg = renderToSvg(buildBoxEvolutionOption(run), args.width, args.height);
    writeSvg(args.out, svg);
    console.log(`wrote ${args.out} ` +
      `(${run.summary.box_evolution.length - 1} updates)`);
    return 0;
  } catch (err) {
    console.error(String(err));
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
