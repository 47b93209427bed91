/**
 * Typed views of the run artifacts this package consumes, with validators.
 * Everything here is read-only over the documented CSV/JSON schemas; no
 * coupling to producer internals.
 */
import * as fs from "fs";
import * as path from "path";
import { CsvTable, SchemaError, readCsv, readJson } from "./csv.js";

// ---------------------------------------------------------------------------
// Artifact shapes

export const SNAPSHOT_COLUMNS = ["x", "rho", "u", "phi", "w"] as const;
export const SERIES_REQUIRED = ["t", "min_w", "max_ux", "energy_total"] as const;

export interface FitResultJson {
  /** null when the fit was declined (e.g. bounded seminorm at beta <= 1/3) */
  exponent: number | null;
  prefactor: number | null;
  r2: number | null;
  window: [number, number];
  status: string;
}

export interface ReportJson {
  t_star: number;
  x_star: number;
  temporal_fits: Record<string, FitResultJson>;
  spatial_fit: FitResultJson | null;
  spatial_fit_twoparam: { C: number; offset: number; r2: number } | null;
  ux_inverse_fit: FitResultJson | null;
  notes: Record<string, number>;
  series?: { t: number[]; seminorms: Record<string, number[]> };
}

export interface EventJson {
  snapshot_times: number[];
  snapshot_min_w: number[];
  timeout: boolean;
  event?: {
    t_star: number;
    x_star: number;
    alpha_star: number;
    min_w_at_stop: number;
    t_stop: number;
    fit_r2: number;
  };
}

export interface RunArtifacts {
  dir: string;
  event: EventJson;
  snapshotPaths: string[];
  seriesPath: string;
  reportPath: string | null;
}

// ---------------------------------------------------------------------------
// Validation

function expectColumns(table: CsvTable, required: readonly string[], source: string) {
  for (const c of required) {
    if (!table.columns.includes(c)) {
      throw new SchemaError(`${source}: missing column "${c}" (has ${table.columns.join(",")})`);
    }
  }
}

export function validateSnapshot(table: CsvTable, source: string): void {
  expectColumns(table, SNAPSHOT_COLUMNS, source);
  if (table.schema !== 1) throw new SchemaError(`${source}: unsupported schema ${table.schema}`);
  if (table.rows < 3) throw new SchemaError(`${source}: too few rows`);
}

export function validateSeries(table: CsvTable, source: string): void {
  expectColumns(table, SERIES_REQUIRED, source);
  if (table.schema !== 1) throw new SchemaError(`${source}: unsupported schema ${table.schema}`);
}

function numberOrNull(v: unknown): boolean {
  return v === null || typeof v === "number";
}

function isFit(v: unknown): v is FitResultJson {
  if (typeof v !== "object" || v === null) return false;
  const o = v as Record<string, unknown>;
  return (
    numberOrNull(o.exponent) &&
    numberOrNull(o.prefactor) &&
    numberOrNull(o.r2) &&
    Array.isArray(o.window) &&
    o.window.length === 2 &&
    typeof o.status === "string"
  );
}

export function validateReport(raw: unknown, source: string): ReportJson {
  if (typeof raw !== "object" || raw === null) {
    throw new SchemaError(`${source}: report must be an object`);
  }
  const o = raw as Record<string, unknown>;
  for (const key of ["t_star", "x_star"]) {
    if (typeof o[key] !== "number") throw new SchemaError(`${source}: missing numeric "${key}"`);
  }
  if (typeof o.temporal_fits !== "object" || o.temporal_fits === null) {
    throw new SchemaError(`${source}: missing "temporal_fits" map`);
  }
  for (const [beta, fit] of Object.entries(o.temporal_fits as Record<string, unknown>)) {
    if (Number.isNaN(Number(beta))) {
      throw new SchemaError(`${source}: temporal_fits key "${beta}" is not a beta value`);
    }
    if (!isFit(fit)) throw new SchemaError(`${source}: temporal_fits["${beta}"] malformed`);
  }
  if (o.series !== undefined) {
    const s = o.series as Record<string, unknown>;
    if (!Array.isArray(s.t) || typeof s.seminorms !== "object" || s.seminorms === null) {
      throw new SchemaError(`${source}: "series" must hold t[] and seminorms{}`);
    }
    for (const [beta, vals] of Object.entries(s.seminorms as Record<string, unknown>)) {
      if (!Array.isArray(vals) || vals.length !== (s.t as unknown[]).length) {
        throw new SchemaError(`${source}: series.seminorms["${beta}"] length mismatch`);
      }
    }
  }
  return raw as ReportJson;
}

export function validateEvent(raw: unknown, source: string): EventJson {
  if (typeof raw !== "object" || raw === null) {
    throw new SchemaError(`${source}: event file must be an object`);
  }
  const o = raw as Record<string, unknown>;
  if (!Array.isArray(o.snapshot_times) || !Array.isArray(o.snapshot_min_w)) {
    throw new SchemaError(`${source}: missing snapshot_times / snapshot_min_w arrays`);
  }
  if (o.snapshot_times.length !== o.snapshot_min_w.length) {
    throw new SchemaError(`${source}: snapshot arrays disagree in length`);
  }
  return raw as EventJson;
}

// ---------------------------------------------------------------------------
// Run-directory loader

export function loadRunArtifacts(runDir: string): RunArtifacts {
  const eventPath = path.join(runDir, "event.json");
  const event = validateEvent(readJson(eventPath), eventPath);
  const snapDir = path.join(runDir, "snapshots");
  const expected = event.snapshot_times.map((_, i) =>
    path.join(snapDir, `snap_${String(i).padStart(4, "0")}.csv`),
  );
  const missing = expected.filter((p) => !fs.existsSync(p));
  if (missing.length > 0) {
    throw new SchemaError(
      `run ${runDir} is missing ${missing.length} snapshot file(s): ` +
        missing.map((p) => path.basename(p)).join(", "),
    );
  }
  const seriesPath = path.join(runDir, "series.csv");
  validateSeries(readCsv(seriesPath), seriesPath);
  const reportPath = path.join(runDir, "report.json");
  return {
    dir: runDir,
    event,
    snapshotPaths: expected,
    seriesPath,
    reportPath: fs.existsSync(reportPath) ? reportPath : null,
  };
}
