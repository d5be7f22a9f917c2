/**
 * Loaders for boxsafe run directories.
 *
 * A run directory holds `trajectory.csv` (rectangular numeric table, schema
 * `t, x1..xn, u1..um, h[, psi1], V, margin_barrier, margin_clf`) and
 * `summary.json` (scenario echo, resolved config, metrics, parameter-box
 * evolution).  Everything the plots draw comes from these two files; nothing
 * is recomputed from dynamics.
 */

import fs from "node:fs";
import path from "node:path";

import Papa from "papaparse";

export interface BoxRecord {
  t: number;
  lower: number[];
  upper: number[];
}

export interface ScenarioInfo {
  name: string;
  n: number;
  m: number;
  p: number;
  theta_true: number[];
  theta0: { lower: number[]; upper: number[] };
  position_dims: number[];
  obstacle?: { center: [number, number]; radius: number };
  safe_set_boundary?: [number, number][];
}

export interface RunSummary {
  scenario: ScenarioInfo;
  config: {
    controller: string;
    smid_enabled: boolean;
    dt: number;
    horizon: number;
  };
  metrics: Record<string, unknown>;
  box_evolution: BoxRecord[];
  failure: null | { reason: string; t: number };
}

export interface RunTable {
  columns: string[];
  rows: number[][];
}

export interface LoadedRun {
  dir: string;
  label: string;
  summary: RunSummary;
  table: RunTable;
}

export class MissingColumnError extends Error {
  constructor(dir: string, column: string) {
    super(`run ${dir}: trajectory.csv has no column '${column}'`);
    this.name = "MissingColumnError";
  }
}

export function loadTable(csvPath: string): RunTable {
  const text = fs.readFileSync(csvPath, "utf8");
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new Error(`${csvPath}: ${parsed.errors[0].message}`);
  }
  const raw = parsed.data;
  if (raw.length < 2) {
    throw new Error(`${csvPath}: no data rows`);
  }
  const columns = raw[0];
  const rows = raw.slice(1).map((cells, i) => {
    if (cells.length !== columns.length) {
      throw new Error(`${csvPath}: row ${i + 1} has ${cells.length} cells, ` +
        `expected ${columns.length}`);
    }
    return cells.map(Number);
  });
  return { columns, rows };
}

export function column(run: LoadedRun, name: string): number[] {
  const idx = run.table.columns.indexOf(name);
  if (idx < 0) {
    throw new MissingColumnError(run.dir, name);
  }
  return run.table.rows.map((r) => r[idx]);
}

export function requireColumns(run: LoadedRun, names: string[]): void {
  for (const name of names) {
    if (!run.table.columns.includes(name)) {
      throw new MissingColumnError(run.dir, name);
    }
  }
}

/** Short human label: controller plus identification state. */
export function runLabel(summary: RunSummary, dir: string): string {
  const smid = summary.config.smid_enabled ? "smid on" : "smid off";
  const ctrl = summary.config.controller;
  const base = path.basename(path.resolve(dir));
  return `${base} (${ctrl}, ${smid})`;
}

export function loadRun(dir: string): LoadedRun {
  const summaryPath = path.join(dir, "summary.json");
  const csvPath = path.join(dir, "trajectory.csv");
  for (const p of [summaryPath, csvPath]) {
    if (!fs.existsSync(p)) {
      throw new Error(`run ${dir}: missing ${path.basename(p)}`);
    }
  }
  const summary = JSON.parse(fs.readFileSync(summaryPath, "utf8")) as RunSummary;
  const table = loadTable(csvPath);
  return { dir, label: runLabel(summary, dir), summary, table };
}

/** Position columns (CSV names) according to the scenario's position dims. */
export function positionColumns(run: LoadedRun): [string, string] {
  const dims = run.summary.scenario.position_dims ?? [0, 1];
  return [`x${dims[0] + 1}`, `x${dims[1] + 1}`];
}

export function inputColumns(run: LoadedRun): string[] {
  const m = run.summary.scenario.m;
  return Array.from({ length: m }, (_, i) => `u${i + 1}`);
}
