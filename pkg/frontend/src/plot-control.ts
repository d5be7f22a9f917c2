#!/usr/bin/env node
/**
 * Stacked control-input traces, one panel per run.
 *
 *   node dist/plot-control.js RUN_DIR [RUN_DIR ...] [--out file.svg]
 */

import process from "node:process";

import { buildControlOption } from "./charts";
import { parsePlotArgs } from "./cli";
import { loadRun } from "./data";
import { renderToSvg, writeSvg } from "./render";

export function main(argv: string[]): number {
  const args = parsePlotArgs(argv, "control.svg");
  if (typeof args === "string") {
    console.error(`usage error: ${args}`);
    return 2;
  }
  try {
    const runs = args.dirs.map(loadRun);
    const svg = renderToSvg(buildControlOption(runs), args.width, args.height);
    writeSvg(args.out, svg);
    console.log(`wrote ${args.out} (${runs.length} panel${runs.length > 1 ? "s" : ""})`);
    return 0;
  } catch (err) {
    console.error(String(err));
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
