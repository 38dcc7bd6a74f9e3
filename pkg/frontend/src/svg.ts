/** Deterministic SVG line plots: fixed canvas, fixed precision number
 *  formatting, no timestamps or generated ids. */

export interface SeriesSpec {
  xs: number[];
  ys: number[];
  color: string;
  label: string;
  dash?: string;
  width?: number;
}

export interface LinePlotSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  logX?: boolean;
  logY?: boolean;
  series: SeriesSpec[];
  /** straight guide of given slope through (x0, y0) in log-log space */
  guide?: { slope: number; x0: number; y0: number; label: string };
}

const W = 720;
const H = 480;
const ML = 70;
const MR = 20;
const MT = 40;
const MB = 55;

const fmt = (v: number): string => {
  if (!Number.isFinite(v)) return "0";
  return v.toPrecision(8).replace(/\.?0+$/, "").replace(/\.?0+e/, "e");
};

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function niceTicks(lo: number, hi: number, log: boolean): number[] {
  if (log) {
    const out: number[] = [];
    for (let e = Math.ceil(Math.log10(lo) - 1e-9); Math.pow(10, e) <= hi * (1 + 1e-9); e++) {
      out.push(Math.pow(10, e));
    }
    return out.length >= 2 ? out : [lo, hi];
  }
  const span = hi - lo || 1;
  const step = Math.pow(10, Math.floor(Math.log10(span / 4)));
  const mult = span / step > 8 ? 2 : 1;
  const out: number[] = [];
  for (let v = Math.ceil(lo / (step * mult)) * step * mult; v <= hi + 1e-12 * span; v += step * mult) {
    out.push(v);
  }
  return out;
}

export function renderLinePlot(spec: LinePlotSpec): string {
  const tx = (v: number) => (spec.logX ? Math.log10(v) : v);
  const ty = (v: number) => (spec.logY ? Math.log10(v) : v);
  let xlo = Infinity;
  let xhi = -Infinity;
  let ylo = Infinity;
  let yhi = -Infinity;
  for (const s of spec.series) {
    for (let i = 0; i < s.xs.length; i++) {
      const x = s.xs[i];
      const y = s.ys[i];
      if (spec.logX && x <= 0) continue;
      if (spec.logY && y <= 0) continue;
      xlo = Math.min(xlo, x);
      xhi = Math.max(xhi, x);
      ylo = Math.min(ylo, y);
      yhi = Math.max(yhi, y);
    }
  }
  if (!Number.isFinite(xlo) || !Number.isFinite(ylo)) {
    throw new Error("no plottable points");
  }
  if (xlo === xhi) { xhi = xlo + 1; }
  if (ylo === yhi) { yhi = ylo * 1.1 + 1e-300; }
  const px = (x: number) => ML + ((tx(x) - tx(xlo)) / (tx(xhi) - tx(xlo))) * (W - ML - MR);
  const py = (y: number) => H - MB - ((ty(y) - ty(ylo)) / (ty(yhi) - ty(ylo))) * (H - MT - MB);

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}">`);
  parts.push(`<rect width="${W}" height="${H}" fill="white"/>`);
  parts.push(`<text x="${W / 2}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">${esc(spec.title)}</text>`);

  for (const t of niceTicks(xlo, xhi, !!spec.logX)) {
    const x = px(t);
    parts.push(`<line x1="${fmt(x)}" y1="${MT}" x2="${fmt(x)}" y2="${H - MB}" stroke="#dddddd" stroke-width="1"/>`);
    parts.push(`<text x="${fmt(x)}" y="${H - MB + 18}" font-family="sans-serif" font-size="11" text-anchor="middle">${fmt(t)}</text>`);
  }
  for (const t of niceTicks(ylo, yhi, !!spec.logY)) {
    const y = py(t);
    parts.push(`<line x1="${ML}" y1="${fmt(y)}" x2="${W - MR}" y2="${fmt(y)}" stroke="#dddddd" stroke-width="1"/>`);
    parts.push(`<text x="${ML - 6}" y="${fmt(y + 4)}" font-family="sans-serif" font-size="11" text-anchor="end">${fmt(t)}</text>`);
  }
  parts.push(`<rect x="${ML}" y="${MT}" width="${W - ML - MR}" height="${H - MT - MB}" fill="none" stroke="#333333"/>`);
  parts.push(`<text x="${W / 2}" y="${H - 14}" font-family="sans-serif" font-size="13" text-anchor="middle">${esc(spec.xLabel)}</text>`);
  parts.push(`<text x="18" y="${H / 2}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 ${H / 2})">${esc(spec.yLabel)}</text>`);

  if (spec.guide) {
    const g = spec.guide;
    const y1 = g.y0 * Math.pow(xlo / g.x0, g.slope);
    const y2 = g.y0 * Math.pow(xhi / g.x0, g.slope);
    parts.push(`<line x1="${fmt(px(xlo))}" y1="${fmt(py(y1))}" x2="${fmt(px(xhi))}" y2="${fmt(py(y2))}" stroke="#888888" stroke-width="1.5" stroke-dasharray="6 4"/>`);
    parts.push(`<text x="${fmt(px(xhi) - 4)}" y="${fmt(py(y2) - 6)}" font-family="sans-serif" font-size="12" text-anchor="end" fill="#555555">${esc(g.label)}</text>`);
  }

  let legendY = MT + 16;
  for (const s of spec.series) {
    const d: string[] = [];
    for (let i = 0; i < s.xs.length; i++) {
      const x = s.xs[i];
      const y = s.ys[i];
      if ((spec.logX && x <= 0) || (spec.logY && y <= 0)) continue;
      d.push(`${d.length === 0 ? "M" : "L"}${fmt(px(x))} ${fmt(py(y))}`);
    }
    parts.push(`<path d="${d.join(" ")}" fill="none" stroke="${s.color}" stroke-width="${s.width ?? 2}"${s.dash ? ` stroke-dasharray="${s.dash}"` : ""}/>`);
    parts.push(`<line x1="${W - MR - 150}" y1="${legendY}" x2="${W - MR - 120}" y2="${legendY}" stroke="${s.color}" stroke-width="3"/>`);
    parts.push(`<text x="${W - MR - 114}" y="${legendY + 4}" font-family="sans-serif" font-size="12">${esc(s.label)}</text>`);
    legendY += 18;
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
