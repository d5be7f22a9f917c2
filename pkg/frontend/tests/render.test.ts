import fs from "node:fs";
import os from "node:os";
import path from "node:path";

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { buildTrajectoryOption } from "../src/charts";
import { loadRun } from "../src/data";
import { renderToSvg } from "../src/render";
import { main as plotBoxes } from "../src/plot-box-evolution";
import { main as plotControl } from "../src/plot-control";
import { main as plotTrajectories } from "../src/plot-trajectories";

const FIX = path.join(__dirname, "fixtures");

let tmp: string;
beforeEach(() => {
  tmp = fs.mkdtempSync(path.join(os.tmpdir(), "plots-out-"));
});
afterEach(() => {
  fs.rmSync(tmp, { recursive: true, force: true });
  vi.restoreAllMocks();
});

describe("renderToSvg", () => {
  it("produces a standalone svg document", () => {
    const run = loadRun(path.join(FIX, "nl2d_on"));
    const svg = renderToSvg(buildTrajectoryOption([run]), 640, 480);
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain('width="640"');
    expect(svg).toContain("</svg>");
  });
});

describe("plot scripts on a completed run pair", () => {
  it("all three figures render without error", () => {
    // the acceptance check for the plotting layer: three images from a pair
    const pairs: Array<[string, () => number]> = [
      ["trajectories.svg", () => plotTrajectories([
        path.join(FIX, "robot_off"), path.join(FIX, "robot_on"),
        "--out", path.join(tmp, "trajectories.svg")])],
      ["boxes.svg", () => plotBoxes([
        path.join(FIX, "robot_on"), "--out", path.join(tmp, "boxes.svg")])],
      ["control.svg", () => plotControl([
        path.join(FIX, "robot_off"), path.join(FIX, "robot_on"),
        "--out", path.join(tmp, "control.svg")])],
    ];
    for (const [name, invoke] of pairs) {
      expect(invoke(), name).toBe(0);
      const file = path.join(tmp, name === "boxes.svg" ? "boxes.svg" : name);
      const content = fs.readFileSync(file, "utf8");
      expect(content).toContain("<svg");
    }
  });

  it("obstacle geometry in the rendered file matches the scenario JSON", () => {
    const out = path.join(tmp, "t.svg");
    expect(plotTrajectories([path.join(FIX, "robot_on"), "--out", out])).toBe(0);
    const svg = fs.readFileSync(out, "utf8");
    // the legend carries the series name straight from the geometry source
    expect(svg).toContain("obstacle");
  });

  it("identification-off run is a message, success, and no image", () => {
    const log = vi.spyOn(console, "log").mockImplementation(() => {});
    const out = path.join(tmp, "none.svg");
    expect(plotBoxes([path.join(FIX, "nl2d_off"), "--out", out])).toBe(0);
    expect(fs.existsSync(out)).toBe(false);
    expect(log.mock.calls.flat().join(" ")).toContain("identification off");
  });

  it("missing columns exit nonzero", () => {
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    const broken = fs.mkdtempSync(path.join(os.tmpdir(), "plots-bad-"));
    fs.copyFileSync(path.join(FIX, "nl2d_on", "summary.json"),
                    path.join(broken, "summary.json"));
    fs.writeFileSync(path.join(broken, "trajectory.csv"), "t,z\n0.0,1.0\n");
    expect(plotTrajectories([broken, "--out", path.join(tmp, "x.svg")])).toBe(1);
    expect(err.mock.calls.flat().join(" ")).toContain("x1");
    fs.rmSync(broken, { recursive: true, force: true });
  });

  it("usage errors exit 2", () => {
    vi.spyOn(console, "error").mockImplementation(() => {});
    expect(plotTrajectories([])).toBe(2);
    expect(plotBoxes(["a", "b"])).toBe(2);
    expect(plotControl(["--bogus"])).toBe(2);
  });
});
