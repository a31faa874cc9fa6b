/**
 * Minimal deterministic SVG chart builder: fixed canvas size, linear and
 * log axes with decade/nice ticks, polyline series, heatmap cells.
 * No runtime dependencies so the figures are reproducible byte-for-byte.
 */

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { left: 72, right: 24, top: 36, bottom: 52 };

export type Scale = "linear" | "log";

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export interface Series {
  label: string;
  x: number[];
  y: number[];
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return String(Number(v.toPrecision(4)));
}

function niceTicks(lo: number, hi: number, n = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = span / n;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const candidates = [1, 2, 5, 10].map((m) => m * mag);
  const step = candidates.find((s) => span / s <= n) ?? candidates[3];
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) {
    out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return out;
}

function logTicks(lo: number, hi: number): number[] {
  const out: number[] = [];
  const e0 = Math.ceil(Math.log10(lo) - 1e-9);
  const e1 = Math.floor(Math.log10(hi) + 1e-9);
  const stride = Math.max(1, Math.ceil((e1 - e0) / 8));
  for (let e = e0; e <= e1; e += stride) out.push(Math.pow(10, e));
  return out.length > 0 ? out : [lo, hi];
}

class Axis {
  constructor(
    public readonly scale: Scale,
    public lo: number,
    public hi: number,
    private readonly pixLo: number,
    private readonly pixHi: number,
  ) {
    if (scale === "log") {
      if (!(lo > 0)) throw new Error("log axis needs positive bounds");
      this.lo = Math.log10(lo);
      this.hi = Math.log10(hi);
    }
    if (this.hi <= this.lo) {
      // degenerate range: widen symmetrically so everything maps mid-axis
      const pad = this.lo === 0 ? 1 : Math.abs(this.lo) * 0.5;
      this.lo -= pad;
      this.hi += pad;
    }
  }

  toPix(v: number): number {
    const t = this.scale === "log" ? Math.log10(v) : v;
    const f = (t - this.lo) / (this.hi - this.lo);
    return this.pixLo + f * (this.pixHi - this.pixLo);
  }

  ticks(): number[] {
    if (this.scale === "log") {
      return logTicks(Math.pow(10, this.lo), Math.pow(10, this.hi));
    }
    return niceTicks(this.lo, this.hi);
  }
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo === Infinity) return [0, 1];
  return [lo, hi];
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  xScale?: Scale;
  yScale?: Scale;
}

/**
 * Line chart of one or more series. Log axes drop non-positive points; a
 * chart whose series are all empty still renders its axes (header-only CSV).
 */
export function lineChart(series: Series[], opts: ChartOptions): string {
  const xScale = opts.xScale ?? "linear";
  const yScale = opts.yScale ?? "linear";
  const pts: { x: number[]; y: number[] }[] = series.map((s) => {
    const x: number[] = [];
    const y: number[] = [];
    for (let i = 0; i < s.x.length; i++) {
      const xv = s.x[i];
      const yv = s.y[i];
      if (!Number.isFinite(xv) || !Number.isFinite(yv)) continue;
      if (xScale === "log" && xv <= 0) continue;
      if (yScale === "log" && yv <= 0) continue;
      x.push(xv);
      y.push(yv);
    }
    return { x, y };
  });
  const allX = pts.flatMap((p) => p.x);
  const allY = pts.flatMap((p) => p.y);
  let [xLo, xHi] = extent(allX);
  let [yLo, yHi] = extent(allY);
  if (xScale === "log" && xLo <= 0) [xLo, xHi] = [1e-3, 1];
  if (yScale === "log" && yLo <= 0) [yLo, yHi] = [1e-3, 1];
  const ax = new Axis(xScale, xLo, xHi, MARGIN.left, WIDTH - MARGIN.right);
  const ay = new Axis(yScale, yLo, yHi, HEIGHT - MARGIN.bottom, MARGIN.top);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(`<text x="${WIDTH / 2}" y="20" text-anchor="middle" font-size="15">${esc(opts.title)}</text>`);

  // frame + grid + tick labels
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  for (const tv of ax.ticks()) {
    const px = ax.toPix(tv).toFixed(1);
    parts.push(`<line x1="${px}" y1="${y0}" x2="${px}" y2="${y1}" stroke="#ddd"/>`);
    parts.push(`<text x="${px}" y="${y0 + 18}" text-anchor="middle">${fmt(tv)}</text>`);
  }
  for (const tv of ay.ticks()) {
    const py = ay.toPix(tv).toFixed(1);
    parts.push(`<line x1="${x0}" y1="${py}" x2="${x1}" y2="${py}" stroke="#ddd"/>`);
    parts.push(`<text x="${x0 - 6}" y="${py}" text-anchor="end" dominant-baseline="middle">${fmt(tv)}</text>`);
  }
  parts.push(`<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="black"/>`);
  parts.push(`<text x="${(x0 + x1) / 2}" y="${HEIGHT - 12}" text-anchor="middle">${esc(opts.xLabel)}</text>`);
  parts.push(
    `<text x="18" y="${(y0 + y1) / 2}" text-anchor="middle" transform="rotate(-90 18 ${(y0 + y1) / 2})">${esc(opts.yLabel)}</text>`,
  );

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const p = pts[i];
    if (p.x.length > 0) {
      const d = p.x.map((xv, j) => `${ax.toPix(xv).toFixed(2)},${ay.toPix(p.y[j]).toFixed(2)}`).join(" ");
      const marks = p.x.length <= 16 ? ` stroke-width="1.5"` : ``;
      parts.push(`<polyline points="${d}" fill="none" stroke="${color}"${marks}/>`);
      if (p.x.length <= 16) {
        for (let j = 0; j < p.x.length; j++) {
          parts.push(
            `<circle cx="${ax.toPix(p.x[j]).toFixed(2)}" cy="${ay.toPix(p.y[j]).toFixed(2)}" r="3.5" fill="${color}"/>`,
          );
        }
      }
    }
    const ly = y1 + 16 + 16 * i;
    parts.push(`<line x1="${x1 - 140}" y1="${ly - 4}" x2="${x1 - 116}" y2="${ly - 4}" stroke="${color}" stroke-width="2"/>`);
    parts.push(`<text x="${x1 - 110}" y="${ly}">${esc(s.label)}</text>`);
  });
  parts.push("</svg>");
  return parts.join("\n");
}

/** Diverging blue-white-red map for v in [-1, 1] (clipped). */
export function divergingColor(v: number): string {
  const t = Math.max(-1, Math.min(1, v));
  let r: number, g: number, b: number;
  if (t < 0) {
    // blue -> white
    const f = t + 1;
    r = Math.round(33 + f * (255 - 33));
    g = Math.round(102 + f * (255 - 102));
    b = Math.round(172 + f * (255 - 172));
  } else {
    // white -> red
    r = Math.round(255 - t * (255 - 178));
    g = Math.round(255 - t * (255 - 24));
    b = Math.round(255 - t * (255 - 43));
  }
  return `rgb(${r},${g},${b})`;
}

/** Heatmap of a cell field (row-major, x-fastest over y) with a colorbar. */
export function fieldPanel(
  values: Float64Array,
  nx: number,
  ny: number,
  title: string,
): string {
  const panelW = WIDTH - MARGIN.left - MARGIN.right - 70; // room for colorbar
  const panelH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const cw = panelW / nx;
  const ch = panelH / ny;
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(`<text x="${WIDTH / 2}" y="20" text-anchor="middle" font-size="15">${esc(title)}</text>`);
  for (let j = 0; j < ny; j++) {
    for (let i = 0; i < nx; i++) {
      const v = values[i * ny + j];
      const x = MARGIN.left + i * cw;
      // y axis points up: row 0 at the bottom
      const y = MARGIN.top + (ny - 1 - j) * ch;
      parts.push(
        `<rect x="${x.toFixed(2)}" y="${y.toFixed(2)}" width="${(cw + 0.5).toFixed(2)}" ` +
          `height="${(ch + 0.5).toFixed(2)}" fill="${divergingColor(v)}"/>`,
      );
    }
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${panelW}" height="${panelH}" fill="none" stroke="black"/>`,
  );
  // colorbar clipped to [-1, 1]
  const barX = WIDTH - MARGIN.right - 40;
  const nSteps = 64;
  const stepH = panelH / nSteps;
  for (let k = 0; k < nSteps; k++) {
    const v = 1 - (2 * (k + 0.5)) / nSteps;
    parts.push(
      `<rect x="${barX}" y="${(MARGIN.top + k * stepH).toFixed(2)}" width="18" ` +
        `height="${(stepH + 0.5).toFixed(2)}" fill="${divergingColor(v)}"/>`,
    );
  }
  parts.push(`<rect x="${barX}" y="${MARGIN.top}" width="18" height="${panelH}" fill="none" stroke="black"/>`);
  for (const [v, label] of [[1, "+1"], [0, "0"], [-1, "-1"]] as [number, string][]) {
    const y = MARGIN.top + ((1 - v) / 2) * panelH;
    parts.push(`<text x="${barX + 24}" y="${y}" dominant-baseline="middle">${label}</text>`);
  }
  parts.push("</svg>");
  return parts.join("\n");
}
