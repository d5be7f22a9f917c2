/**
 * Chart-option builders, kept pure so the tests can check the geometry the
 * figures will draw (boundary polylines, obstacle circles, box rectangles)
 * against the scenario JSON without rendering anything.
 */

import type { EChartsOption, SeriesOption } from "echarts";

import {
  LoadedRun,
  column,
  inputColumns,
  positionColumns,
  requireColumns,
} from "./data";

const PATH_COLORS = ["#1f77b4", "#ff7f0e", "#9467bd", "#2ca02c", "#d62728"];

export function circlePoints(
  center: [number, number],
  radius: number,
  count = 120,
): [number, number][] {
  const pts: [number, number][] = [];
  for (let k = 0; k < count; k++) {
    const a = (2 * Math.PI * k) / count;
    pts.push([center[0] + radius * Math.cos(a), center[1] + radius * Math.sin(a)]);
  }
  pts.push([...pts[0]]);  // close exactly despite rounding
  return pts;
}

export function rectanglePoints(
  lower: [number, number],
  upper: [number, number],
): [number, number][] {
  const [lx, ly] = lower;
  const [ux, uy] = upper;
  return [[lx, ly], [ux, ly], [ux, uy], [lx, uy], [lx, ly]];
}

/** Overlaid position paths with the safe-set boundary / obstacle disk. */
export function buildTrajectoryOption(runs: LoadedRun[]): EChartsOption {
  if (runs.length === 0) {
    throw new Error("no runs given");
  }
  const series: SeriesOption[] = [];
  runs.forEach((run, i) => {
    const [cx, cy] = positionColumns(run);
    requireColumns(run, [cx, cy]);
    const xs = column(run, cx);
    const ys = column(run, cy);
    series.push({
      type: "line",
      name: run.label,
      data: xs.map((x, k) => [x, ys[k]]),
      showSymbol: false,
      lineStyle: { width: 2, color: PATH_COLORS[i % PATH_COLORS.length] },
      color: PATH_COLORS[i % PATH_COLORS.length],
    });
    series.push({
      type: "scatter",
      name: `${run.label} start`,
      data: [[xs[0], ys[0]]],
      symbolSize: 8,
      color: PATH_COLORS[i % PATH_COLORS.length],
      tooltip: { show: false },
    });
  });

  // Boundary geometry comes from the scenario echo of the first run; the
  // runs being compared share a scenario.
  const scenario = runs[0].summary.scenario;
  if (scenario.obstacle) {
    series.push({
      type: "line",
      name: "obstacle",
      data: circlePoints(scenario.obstacle.center, scenario.obstacle.radius),
      showSymbol: false,
      lineStyle: { width: 2, color: "#333333", type: "solid" },
      areaStyle: { color: "#cccccc", opacity: 0.5 },
      color: "#333333",
    });
  }
  if (scenario.safe_set_boundary) {
    series.push({
      type: "line",
      name: "safe-set boundary",
      data: scenario.safe_set_boundary,
      showSymbol: false,
      lineStyle: { width: 2, color: "#111111", type: "dashed" },
      color: "#111111",
    });
  }
  return {
    animation: false,
    title: { text: `${scenario.name}: closed-loop position paths` },
    legend: { top: 28, type: "scroll" },
    grid: { top: 64, left: 60, right: 24, bottom: 48 },
    xAxis: { type: "value", name: "x1", scale: true },
    yAxis: { type: "value", name: "x2", scale: true },
    series,
  };
}

/** Initial vs final parameter boxes on three 2-D projections, truth dots. */
export function buildBoxEvolutionOption(run: LoadedRun): EChartsOption {
  const boxes = run.summary.box_evolution;
  if (!boxes || boxes.length === 0) {
    throw new Error(`run ${run.dir}: summary has no box evolution records`);
  }
  const first = boxes[0];
  const last = boxes[boxes.length - 1];
  const truth = run.summary.scenario.theta_true;
  const d = first.lower.length;
  const pairs: [number, number][] = [];
  for (let j = 1; j < Math.min(d, 4); j++) {
    pairs.push([0, j]);
  }

  const grids: object[] = [];
  const xAxes: object[] = [];
  const yAxes: object[] = [];
  const series: SeriesOption[] = [];
  pairs.forEach(([a, b], i) => {
    grids.push({
      left: `${6 + i * 32}%`,
      width: "24%",
      top: 64,
      bottom: 48,
    });
    xAxes.push({ type: "value", gridIndex: i, name: `theta${a + 1}`, scale: true });
    yAxes.push({ type: "value", gridIndex: i, name: `theta${b + 1}`, scale: true });
    series.push({
      type: "line",
      name: i === 0 ? "initial box" : undefined,
      xAxisIndex: i,
      yAxisIndex: i,
      data: rectanglePoints([first.lower[a], first.lower[b]],
                            [first.upper[a], first.upper[b]]),
      showSymbol: false,
      lineStyle: { color: "#9ecae1", width: 2 },
      areaStyle: { color: "#9ecae1", opacity: 0.25 },
      color: "#9ecae1",
    });
    series.push({
      type: "line",
      name: i === 0 ? "final box" : undefined,
      xAxisIndex: i,
      yAxisIndex: i,
      data: rectanglePoints([last.lower[a], last.lower[b]],
                            [last.upper[a], last.upper[b]]),
      showSymbol: false,
      lineStyle: { color: "#08519c", width: 2 },
      color: "#08519c",
    });
    series.push({
      type: "scatter",
      name: i === 0 ? "true parameters" : undefined,
      xAxisIndex: i,
      yAxisIndex: i,
      data: [[truth[a], truth[b]]],
      symbolSize: 9,
      color: "#d62728",
    });
  });
  return {
    animation: false,
    title: {
      text: `${run.summary.scenario.name}: parameter-box refinement ` +
        `(${boxes.length - 1} updates)`,
    },
    legend: { top: 28 },
    grid: grids,
    xAxis: xAxes,
    yAxis: yAxes,
    series,
  };
}

/** Stacked input traces, one panel per run. */
export function buildControlOption(runs: LoadedRun[]): EChartsOption {
  if (runs.length === 0) {
    throw new Error("no runs given");
  }
  const grids: object[] = [];
  const xAxes: object[] = [];
  const yAxes: object[] = [];
  const series: SeriesOption[] = [];
  const panelHeight = Math.floor(82 / runs.length);
  runs.forEach((run, i) => {
    requireColumns(run, ["t", ...inputColumns(run)]);
    const t = column(run, "t");
    grids.push({
      left: 70,
      right: 24,
      top: `${10 + i * (panelHeight + 4)}%`,
      height: `${panelHeight - 4}%`,
    });
    xAxes.push({
      type: "value",
      gridIndex: i,
      name: i === runs.length - 1 ? "t [s]" : "",
      min: "dataMin",
      max: "dataMax",
    });
    yAxes.push({ type: "value", gridIndex: i, name: run.label, scale: true });
    inputColumns(run).forEach((name, j) => {
      series.push({
        type: "line",
        name: `${name}`,
        xAxisIndex: i,
        yAxisIndex: i,
        data: column(run, name).map((u, k) => [t[k], u]),
        showSymbol: false,
        lineStyle: { width: 1.5, color: PATH_COLORS[j % PATH_COLORS.length] },
        color: PATH_COLORS[j % PATH_COLORS.length],
      });
    });
  });
  return {
    animation: false,
    title: { text: "control inputs" },
    legend: { top: 24 },
    grid: grids,
    xAxis: xAxes,
    yAxis: yAxes,
    series,
  };
}
