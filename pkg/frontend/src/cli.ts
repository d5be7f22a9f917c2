/** Minimal argument handling shared by the plot scripts. */

export interface PlotArgs {
  dirs: string[];
  out: string;
  width: number;
  height: number;
}

export function parsePlotArgs(
  argv: string[],
  defaultOut: string,
): PlotArgs | string {
  const dirs: string[] = [];
  let out = defaultOut;
  let width = 900;
  let height = 620;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--out") {
      out = argv[++i];
      if (out === undefined) return "--out needs a value";
    } else if (arg === "--width") {
      width = Number(argv[++i]);
    } else if (arg === "--height") {
      height = Number(argv[++i]);
    } else if (arg.startsWith("--")) {
      return `unknown flag ${arg}`;
    } else {
      dirs.push(arg);
    }
  }
  if (dirs.length === 0) {
    return "no run directories given";
  }
  if (!Number.isFinite(width) || !Number.isFinite(height)) {
    return "--width/--height need numbers";
  }
  return { dirs, out, width, height };
}
