import * as fs from "fs";
import * as path from "path";
import { fileURLToPath } from "url";
import { describe, expect, it } from "vitest";
import { parseCsv, readCsv, readJson, writeCsv, SchemaError } from "../src/csv.js";
import {
  loadRunArtifacts,
  validateReport,
  validateSeries,
  validateSnapshot,
} from "../src/schema.js";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const RUN = path.join(HERE, "..", "fixtures", "run");

describe("fixture run artifacts", () => {
  it("loads the run directory with all snapshots present", () => {
    const run = loadRunArtifacts(RUN);
    expect(run.snapshotPaths.length).toBeGreaterThan(5);
    expect(run.event.event?.t_star).toBeDefined();
    expect(run.reportPath).not.toBeNull();
  });

  it("every snapshot satisfies the schema and round-trips", () => {
    const run = loadRunArtifacts(RUN);
    for (const p of run.snapshotPaths) {
      const table = readCsv(p);
      validateSnapshot(table, p);
      const again = readCsvFromString(writeCsv(table));
      expect(again.data).toEqual(table.data);
    }
  });

  it("series roundtrips and has monotone time", () => {
    const run = loadRunArtifacts(RUN);
    const series = readCsv(run.seriesPath);
    validateSeries(series, run.seriesPath);
    const t = series.data.t;
    for (let i = 1; i < t.length; i++) expect(t[i]).toBeGreaterThan(t[i - 1]);
    const again = readCsvFromString(writeCsv(series));
    expect(again.data).toEqual(series.data);
  });

  it("report validates with temporal fits and seminorm series", () => {
    const run = loadRunArtifacts(RUN);
    const report = validateReport(readJson(run.reportPath!), run.reportPath!);
    expect(Object.keys(report.temporal_fits).length).toBeGreaterThanOrEqual(2);
    expect(report.series).toBeDefined();
    const bounded = Object.entries(report.temporal_fits).find(
      ([beta]) => Math.abs(Number(beta) - 1 / 3) < 1e-9,
    );
    expect(bounded?.[1].status).toBe("bounded seminorm");
  });

  it("reports what is absent when snapshots are missing", () => {
    const tmp = fs.mkdtempSync(path.join(HERE, "missing-"));
    try {
      fs.mkdirSync(path.join(tmp, "snapshots"));
      fs.copyFileSync(path.join(RUN, "event.json"), path.join(tmp, "event.json"));
      fs.copyFileSync(path.join(RUN, "series.csv"), path.join(tmp, "series.csv"));
      expect(() => loadRunArtifacts(tmp)).toThrow(/snap_0000\.csv/);
    } finally {
      fs.rmSync(tmp, { recursive: true, force: true });
    }
  });

  it("rejects snapshots with missing columns", () => {
    const run = loadRunArtifacts(RUN);
    const table = readCsv(run.snapshotPaths[0]);
    const broken = { ...table, columns: table.columns.filter((c) => c !== "rho") };
    expect(() => validateSnapshot(broken, "broken")).toThrow(SchemaError);
  });
});

function readCsvFromString(text: string) {
  return parseCsv(text);
}
