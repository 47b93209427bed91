/**
 * Density-evolution panel: overlaid rho(x, t) snapshots approaching the
 * blow-up time, with the fitted 1 + C/((T*-t) + |x-x*|^(2/3)) profile dashed.
 */
import { readCsv, readJson, SchemaError } from "./csv.js";
import {
  RunArtifacts,
  ReportJson,
  loadRunArtifacts,
  validateReport,
  validateSnapshot,
} from "./schema.js";
import { Panel, linearScale, niceTicks, svgDocument, timeColor } from "./svg.js";

export interface DensityPlotSpec {
  times: "auto" | number[];
  nCurves: number;
  halfWidth: number | null; // x-window around x*; null = full grid
  width: number;
  height: number;
}

export const DEFAULT_DENSITY_SPEC: DensityPlotSpec = {
  times: "auto",
  nCurves: 6,
  halfWidth: 2.0,
  width: 640,
  height: 420,
};

/** Pick snapshot indices roughly geometric in (T* - t). */
export function selectSnapshotIndices(
  times: number[],
  tStar: number,
  nCurves: number,
): number[] {
  const usable = times
    .map((t, i) => ({ t, i }))
    .filter((r) => r.t < tStar);
  if (usable.length === 0) throw new SchemaError("no snapshots precede t*");
  if (usable.length <= nCurves) return usable.map((r) => r.i);
  const tauMax = tStar - usable[0].t;
  const tauMin = tStar - usable[usable.length - 1].t;
  const targets: number[] = [];
  for (let k = 0; k < nCurves; k++) {
    targets.push(tauMax * Math.pow(tauMin / tauMax, k / (nCurves - 1)));
  }
  const chosen = new Set<number>();
  for (const tau of targets) {
    let best = usable[0].i;
    let bestErr = Infinity;
    for (const r of usable) {
      const err = Math.abs(Math.log((tStar - r.t) / tau));
      if (err < bestErr) {
        bestErr = err;
        best = r.i;
      }
    }
    chosen.add(best);
  }
  return [...chosen].sort((a, b) => a - b);
}

export function renderDensityEvolution(runDir: string, spec: DensityPlotSpec): string {
  const run: RunArtifacts = loadRunArtifacts(runDir);
  const ev = run.event.event;
  const tStar = ev ? ev.t_star : Math.max(...run.event.snapshot_times) + 1e-9;
  const xStar = ev ? ev.x_star : 0;

  let report: ReportJson | null = null;
  if (run.reportPath !== null) {
    report = validateReport(readJson(run.reportPath), run.reportPath);
  }

  const idx =
    spec.times === "auto"
      ? selectSnapshotIndices(run.event.snapshot_times, tStar, spec.nCurves)
      : spec.times.map((t) => nearestIndex(run.event.snapshot_times, t));

  const curves = idx.map((i) => {
    const table = readCsv(run.snapshotPaths[i]);
    validateSnapshot(table, run.snapshotPaths[i]);
    return { t: run.event.snapshot_times[i], x: table.data.x, rho: table.data.rho };
  });

  const lo = spec.halfWidth === null ? Math.min(...curves[0].x) : xStar - spec.halfWidth;
  const hi = spec.halfWidth === null ? Math.max(...curves[0].x) : xStar + spec.halfWidth;
  let rhoMax = 0;
  for (const c of curves) {
    for (let j = 0; j < c.x.length; j++) {
      if (c.x[j] >= lo && c.x[j] <= hi) rhoMax = Math.max(rhoMax, c.rho[j]);
    }
  }

  const m = { top: 34, right: 16, bottom: 44, left: 62 };
  const pw = spec.width - m.left - m.right;
  const ph = spec.height - m.top - m.bottom;
  const xs = linearScale(lo, hi, m.left, m.left + pw);
  const ys = linearScale(0, rhoMax * 1.06, m.top + ph, m.top);
  const panel = new Panel(m.left, m.top, pw, ph, xs, ys);
  panel.frame();
  panel.title("density evolution toward blow-up");
  panel.xAxis(niceTicks(lo, hi), "x");
  panel.yAxis(niceTicks(0, rhoMax * 1.06), "rho");

  curves.forEach((c, k) => {
    const pts: Array<[number, number]> = c.x.map((xv, j) => [xv, c.rho[j]]);
    panel.line(pts, { stroke: timeColor(k / Math.max(curves.length - 1, 1)), width: 1.5 });
  });

  const legendEntries = curves.map((c, k) => ({
    label: `T*-t = ${(tStar - c.t).toExponential(2)}`,
    style: { stroke: timeColor(k / Math.max(curves.length - 1, 1)) },
  }));

  // Dashed fitted profile at the latest drawn time.
  const twoParam = report?.spatial_fit_twoparam ?? null;
  if (twoParam !== null && Number.isFinite(twoParam.C)) {
    const tauLast = tStar - curves[curves.length - 1].t;
    const pts: Array<[number, number]> = [];
    const n = 400;
    for (let j = 0; j <= n; j++) {
      const xv = lo + ((hi - lo) * j) / n;
      const r = Math.abs(xv - xStar);
      pts.push([xv, 1 + twoParam.C / (tauLast + Math.pow(r, 2 / 3))]);
    }
    panel.line(pts, { stroke: "#111", dash: "6 4", width: 1.3 });
    legendEntries.push({
      label: "fit 1 + C/((T*-t) + |x-x*|^(2/3))",
      style: { stroke: "#111", dash: "6 4" } as { stroke: string },
    });
  }
  panel.legend(legendEntries, 0.56, 0.02);
  return svgDocument(spec.width, spec.height, panel.render());
}

function nearestIndex(times: number[], t: number): number {
  let best = 0;
  for (let i = 1; i < times.length; i++) {
    if (Math.abs(times[i] - t) < Math.abs(times[best] - t)) best = i;
  }
  return best;
}
