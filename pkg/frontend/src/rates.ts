/**
 * Rate panels from a blow-up report: log-log Hoelder seminorms against
 * T* - t with fitted slopes annotated, and 1/||u_x|| against t with its
 * linear fit when the run's series.csv sits next to the report.
 */
import * as fs from "fs";
import * as path from "path";
import { readCsv, readJson, SchemaError } from "./csv.js";
import { ReportJson, validateReport, validateSeries } from "./schema.js";
import {
  Panel,
  decadeTicks,
  linearScale,
  log10Scale,
  niceTicks,
  svgDocument,
} from "./svg.js";

export interface RatePlotSpec {
  panelWidth: number;
  panelHeight: number;
  seriesCsv: string | null; // explicit path; null = sibling of the report
}

export const DEFAULT_RATE_SPEC: RatePlotSpec = {
  panelWidth: 320,
  panelHeight: 300,
  seriesCsv: null,
};

interface PanelJob {
  kind: "holder" | "ux";
  beta?: number;
}

export function renderRateFits(reportPath: string, spec: RatePlotSpec): string {
  const report: ReportJson = validateReport(readJson(reportPath), reportPath);
  if (report.series === undefined) {
    throw new SchemaError(`${reportPath}: report carries no seminorm series to plot`);
  }
  const seriesPath =
    spec.seriesCsv ?? path.join(path.dirname(reportPath), "series.csv");
  const haveSeries = fs.existsSync(seriesPath);

  const betas = Object.keys(report.series.seminorms)
    .map(Number)
    .sort((a, b) => a - b);
  const jobs: PanelJob[] = betas.map((b) => ({ kind: "holder", beta: b }));
  if (haveSeries) jobs.push({ kind: "ux" });

  const m = { top: 36, right: 14, bottom: 46, left: 64 };
  const W = spec.panelWidth;
  const H = spec.panelHeight;
  const width = jobs.length * W;
  const parts: string[] = [];

  jobs.forEach((job, k) => {
    const x0 = k * W + m.left;
    const y0 = m.top;
    const pw = W - m.left - m.right;
    const ph = H - m.top - m.bottom;
    if (job.kind === "holder") {
      parts.push(holderPanel(report, job.beta as number, x0, y0, pw, ph));
    } else {
      parts.push(uxPanel(report, seriesPath, x0, y0, pw, ph));
    }
  });
  return svgDocument(width, H, parts.join("\n"));
}

function holderPanel(
  report: ReportJson,
  beta: number,
  x0: number,
  y0: number,
  pw: number,
  ph: number,
): string {
  const series = report.series!;
  const key = Object.keys(series.seminorms).find((k) => Math.abs(Number(k) - beta) < 1e-12)!;
  const vals = series.seminorms[key];
  const taus = series.t.map((t) => report.t_star - t);
  const pts: Array<[number, number]> = taus
    .map((tau, i) => [tau, vals[i]] as [number, number])
    .filter(([tau, v]) => tau > 0 && v > 0);
  if (pts.length === 0) throw new SchemaError(`no positive seminorm data for beta = ${beta}`);

  const tauLo = Math.min(...pts.map((p) => p[0]));
  const tauHi = Math.max(...pts.map((p) => p[0]));
  const vLo = Math.min(...pts.map((p) => p[1]));
  const vHi = Math.max(...pts.map((p) => p[1]));

  const fitKey = Object.keys(report.temporal_fits).find(
    (k) => Math.abs(Number(k) - beta) < 1e-9,
  );
  const fit = fitKey !== undefined ? report.temporal_fits[fitKey] : null;
  const bounded = fit !== null && fit.status === "bounded seminorm";

  const xs = log10Scale(tauLo, tauHi, x0 + pw, x0); // time increases leftward in T*-t
  const ys = bounded
    ? linearScale(0, vHi * 1.3, y0 + ph, y0)
    : log10Scale(vLo / 1.3, vHi * 1.3, y0 + ph, y0);
  const panel = new Panel(x0, y0, pw, ph, xs, ys);
  panel.frame();
  panel.title(`[u]_C^${round2(beta)}`);
  panel.xAxis(decadeTicks(tauLo, tauHi), "T* - t");
  panel.yAxis(bounded ? niceTicks(0, vHi * 1.3) : decadeTicks(vLo / 1.3, vHi * 1.3), "seminorm");
  panel.dots(pts, "#1b4b9c");
  panel.line(pts, { stroke: "#1b4b9c", width: 1.0, opacity: 0.5 });

  if (bounded) {
    panel.annotate("bounded", 0.42, 0.5, "#1b4b9c");
  } else if (fit !== null && fit.exponent !== null && fit.prefactor !== null) {
    const fline: Array<[number, number]> = [tauLo, tauHi].map((tau) => [
      tau,
      (fit.prefactor as number) * Math.pow(tau, fit.exponent as number),
    ]);
    panel.line(fline, { stroke: "#c02424", dash: "5 4", width: 1.3 });
    const expected = -(3 * beta - 1) / 2;
    panel.annotate(`slope ${round3s(fit.exponent)} (expect ${round3s(expected)})`, 0.06, 0.08, "#c02424");
  }
  return panel.render();
}

function uxPanel(
  report: ReportJson,
  seriesPath: string,
  x0: number,
  y0: number,
  pw: number,
  ph: number,
): string {
  const table = readCsv(seriesPath);
  validateSeries(table, seriesPath);
  const ts = table.data.t;
  const gux = table.data.max_ux;
  const pts: Array<[number, number]> = ts
    .map((t, i) => [t, 1 / gux[i]] as [number, number])
    .filter(([, v]) => Number.isFinite(v) && v > 0);
  const tLo = Math.min(...pts.map((p) => p[0]));
  const tHi = Math.max(report.t_star, Math.max(...pts.map((p) => p[0])));
  const vHi = Math.max(...pts.map((p) => p[1]));

  const xs = linearScale(tLo, tHi, x0, x0 + pw);
  const ys = linearScale(0, vHi * 1.08, y0 + ph, y0);
  const panel = new Panel(x0, y0, pw, ph, xs, ys);
  panel.frame();
  panel.title("1 / max|u_x|");
  panel.xAxis(niceTicks(tLo, tHi), "t");
  panel.yAxis(niceTicks(0, vHi * 1.08), "1/max|u_x|");
  panel.line(pts, { stroke: "#1b4b9c", width: 1.4 });

  const fit = report.ux_inverse_fit;
  if (fit !== null && fit.prefactor !== null) {
    const slope = fit.prefactor; // linear-law slope; zero crossing is T*
    const tStarFit = report.notes["t_star_from_ux_fit"] ?? report.t_star;
    const fline: Array<[number, number]> = [tLo, tStarFit].map((t) => [
      t,
      slope * (t - tStarFit),
    ]);
    panel.line(fline, { stroke: "#c02424", dash: "5 4", width: 1.3 });
    const r2 = fit.r2 !== null ? ` (r2 ${round3s(fit.r2)})` : "";
    panel.annotate(`linear fit, T* = ${round3s(tStarFit)}${r2}`, 0.3, 0.08, "#c02424");
  }
  return panel.render();
}

function round2(v: number): string {
  return String(Math.round(v * 100) / 100);
}

function round3s(v: number): string {
  return String(Math.round(v * 1000) / 1000);
}
