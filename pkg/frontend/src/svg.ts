/**
 * Minimal deterministic SVG plotting: linear/log scales, nice ticks, line
 * series, dashed overlays, annotations.  No timestamps, no randomness; the
 * same inputs always render the same bytes.
 */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export type Scale = (v: number) => number;

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function log10Scale(d0: number, d1: number, r0: number, r1: number): Scale {
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const span = l1 - l0 || 1;
  return (v) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0);
}

export function niceTicks(lo: number, hi: number, n = 5): number[] {
  if (!(hi > lo)) return [lo];
  const raw = (hi - lo) / n;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + 1e-12 * step; v += step) {
    ticks.push(Math.abs(v) < 1e-12 * step ? 0 : v);
  }
  return ticks;
}

export function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); e <= Math.floor(Math.log10(hi) + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks.length > 0 ? ticks : [lo, hi];
}

export function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    const e = Math.floor(Math.log10(a));
    const m = v / Math.pow(10, e);
    const ms = Math.abs(m - 1) < 1e-9 ? "" : `${round3(m)}x`;
    return `${ms}1e${e}`;
  }
  return String(round3(v));
}

function round3(v: number): number {
  return Math.round(v * 1000) / 1000;
}

const esc = (s: string) => s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export interface SeriesStyle {
  stroke: string;
  width?: number;
  dash?: string;
  opacity?: number;
}

export class Panel {
  private parts: string[] = [];

  constructor(
    readonly x0: number,
    readonly y0: number,
    readonly w: number,
    readonly h: number,
    readonly xscale: Scale,
    readonly yscale: Scale,
  ) {}

  frame(): void {
    this.parts.push(
      `<rect x="${this.x0}" y="${this.y0}" width="${this.w}" height="${this.h}" ` +
        `fill="none" stroke="#333" stroke-width="1"/>`,
    );
  }

  private clampLine(pts: Array<[number, number]>): string {
    const path: string[] = [];
    let pen = false;
    for (const [px, py] of pts) {
      const sx = this.xscale(px);
      const sy = this.yscale(py);
      const inside =
        Number.isFinite(sx) && Number.isFinite(sy) &&
        sx >= this.x0 - 1 && sx <= this.x0 + this.w + 1 &&
        sy >= this.y0 - 1 && sy <= this.y0 + this.h + 1;
      if (!inside) {
        pen = false;
        continue;
      }
      path.push(`${pen ? "L" : "M"}${r2(sx)},${r2(sy)}`);
      pen = true;
    }
    return path.join(" ");
  }

  line(pts: Array<[number, number]>, style: SeriesStyle): void {
    const d = this.clampLine(pts);
    if (d === "") return;
    const dash = style.dash ? ` stroke-dasharray="${style.dash}"` : "";
    const op = style.opacity !== undefined ? ` stroke-opacity="${style.opacity}"` : "";
    this.parts.push(
      `<path d="${d}" fill="none" stroke="${style.stroke}" ` +
        `stroke-width="${style.width ?? 1.4}"${dash}${op}/>`,
    );
  }

  dots(pts: Array<[number, number]>, fill: string, r = 2.4): void {
    for (const [px, py] of pts) {
      const sx = this.xscale(px);
      const sy = this.yscale(py);
      if (!Number.isFinite(sx) || !Number.isFinite(sy)) continue;
      if (sx < this.x0 - 1 || sx > this.x0 + this.w + 1) continue;
      this.parts.push(`<circle cx="${r2(sx)}" cy="${r2(sy)}" r="${r}" fill="${fill}"/>`);
    }
  }

  xAxis(ticks: number[], label: string): void {
    const y = this.y0 + this.h;
    for (const t of ticks) {
      const sx = this.xscale(t);
      if (sx < this.x0 - 0.5 || sx > this.x0 + this.w + 0.5) continue;
      this.parts.push(`<line x1="${r2(sx)}" y1="${y}" x2="${r2(sx)}" y2="${y + 4}" stroke="#333"/>`);
      this.parts.push(
        `<text x="${r2(sx)}" y="${y + 16}" font-size="10" text-anchor="middle">${esc(fmtTick(t))}</text>`,
      );
    }
    this.parts.push(
      `<text x="${this.x0 + this.w / 2}" y="${y + 30}" font-size="11" text-anchor="middle">${esc(label)}</text>`,
    );
  }

  yAxis(ticks: number[], label: string): void {
    for (const t of ticks) {
      const sy = this.yscale(t);
      if (sy < this.y0 - 0.5 || sy > this.y0 + this.h + 0.5) continue;
      this.parts.push(`<line x1="${this.x0 - 4}" y1="${r2(sy)}" x2="${this.x0}" y2="${r2(sy)}" stroke="#333"/>`);
      this.parts.push(
        `<text x="${this.x0 - 6}" y="${r2(sy + 3)}" font-size="10" text-anchor="end">${esc(fmtTick(t))}</text>`,
      );
    }
    const cx = this.x0 - 40;
    const cy = this.y0 + this.h / 2;
    this.parts.push(
      `<text x="${cx}" y="${cy}" font-size="11" text-anchor="middle" ` +
        `transform="rotate(-90 ${cx} ${cy})">${esc(label)}</text>`,
    );
  }

  title(text: string): void {
    this.parts.push(
      `<text x="${this.x0 + this.w / 2}" y="${this.y0 - 6}" font-size="12" ` +
        `text-anchor="middle" font-weight="bold">${esc(text)}</text>`,
    );
  }

  annotate(text: string, fx: number, fy: number, color = "#333"): void {
    const sx = this.x0 + fx * this.w;
    const sy = this.y0 + fy * this.h;
    this.parts.push(
      `<text x="${r2(sx)}" y="${r2(sy)}" font-size="10" fill="${color}">${esc(text)}</text>`,
    );
  }

  legend(entries: Array<{ label: string; style: SeriesStyle }>, fx = 0.62, fy = 0.05): void {
    let y = this.y0 + fy * this.h + 8;
    const x = this.x0 + fx * this.w;
    for (const e of entries) {
      const dash = e.style.dash ? ` stroke-dasharray="${e.style.dash}"` : "";
      this.parts.push(
        `<line x1="${x}" y1="${y - 3}" x2="${x + 20}" y2="${y - 3}" ` +
          `stroke="${e.style.stroke}" stroke-width="${e.style.width ?? 1.4}"${dash}/>`,
      );
      this.parts.push(`<text x="${x + 25}" y="${y}" font-size="10">${esc(e.label)}</text>`);
      y += 13;
    }
  }

  render(): string {
    return this.parts.join("\n");
  }
}

function r2(v: number): number {
  return Math.round(v * 100) / 100;
}

export function svgDocument(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n` +
    body +
    "\n</svg>\n"
  );
}

/** Perceptually-ordered color ramp for time sequences (dark blue -> red). */
export function timeColor(frac: number): string {
  const stops: Array<[number, number, number]> = [
    [33, 58, 140],
    [60, 120, 180],
    [120, 180, 120],
    [230, 150, 60],
    [200, 40, 40],
  ];
  const f = Math.min(Math.max(frac, 0), 1) * (stops.length - 1);
  const i = Math.min(Math.floor(f), stops.length - 2);
  const t = f - i;
  const mix = stops[i].map((a, k) => Math.round(a + t * (stops[i + 1][k] - a)));
  return `rgb(${mix[0]},${mix[1]},${mix[2]})`;
}
