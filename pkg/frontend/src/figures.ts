/** The four figure kinds. Rendering is pure: artifacts in, image bytes out;
 *  writes go through a temp file and rename, so a failure never leaves a
 *  partial image behind. */

import { mkdirSync, renameSync, rmSync, writeFileSync } from "fs";
import { dirname } from "path";
import { ArtifactError, readField, readJson, readManifest, readSeries } from "./artifacts.js";
import { coneExponentFit } from "./fit.js";
import { heatmapPng } from "./png.js";
import { renderLinePlot } from "./svg.js";
import type { FigureSpec } from "./types.js";

export interface RenderResult {
  out: string;
  /** extra numbers established while drawing (e.g. fitted exponents) */
  facts: Record<string, number>;
}

function need(spec: FigureSpec, role: string): string {
  const p = spec.inputs[role];
  if (!p) throw new ArtifactError(`figure kind ${spec.kind} needs input '${role}'`);
  return p;
}

function atomicWrite(out: string, data: Buffer | string): void {
  mkdirSync(dirname(out), { recursive: true });
  const tmp = out + ".tmp";
  writeFileSync(tmp, data);
  renameSync(tmp, out);
}

/** Cone-profile surface: PNG heatmap of the 2D profile, or an SVG section
 *  for 1D, annotated with the radial power-law exponent fitted from the
 *  matching distance field (should be q/(q-1)). */
export function renderProfileSurface(spec: FigureSpec): RenderResult {
  const vinf = readField(need(spec, "vinf"));
  const dist = readField(need(spec, "dist"));
  if (vinf.values.length !== dist.values.length) {
    throw new ArtifactError("vinf and dist artifacts have mismatched shapes");
  }
  const fit = coneExponentFit(dist.values, vinf.values);
  if (vinf.dim === 2) {
    atomicWrite(spec.out, heatmapPng(vinf.values, vinf.cells));
  } else {
    const xs = Array.from({ length: vinf.cells },
      (_, i) => -vinf.extent + (i + 0.5) * vinf.dx);
    const svg = renderLinePlot({
      title: spec.title ?? `cone profile (fitted distance power ${fit.exponent.toFixed(3)})`,
      xLabel: "x",
      yLabel: "profile value",
      series: [{ xs, ys: Array.from(vinf.values), color: "#1f77b4", label: "profile" }],
    });
    atomicWrite(spec.out, svg);
  }
  return { out: spec.out, facts: { cone_exponent: fit.exponent, r_squared: fit.rSquared } };
}

/** Log-log sup-norm decay with the theoretical slope from the manifest. */
export function renderDecayLogLog(spec: FigureSpec): RenderResult {
  const series = readSeries(need(spec, "series"));
  const manifest = readManifest(need(spec, "manifest"));
  const slope = -manifest.derived.decay_exp;
  let ref = { x: 1, y: 1 };
  for (let i = 0; i < series.t.length; i++) {
    if (series.t[i] > 0 && series.linf[i] > 0 && series.t[i] >= 1.0) {
      ref = { x: series.t[i], y: series.linf[i] };
      break;
    }
  }
  const svg = renderLinePlot({
    title: spec.title ?? `sup-norm decay (reference slope ${slope.toFixed(3)})`,
    xLabel: "t",
    yLabel: "sup norm",
    logX: true,
    logY: true,
    series: [
      { xs: series.t, ys: series.linf, color: "#1f77b4", label: "measured" },
      { xs: series.t, ys: series.l1, color: "#2ca02c", label: "mass", width: 1.5 },
    ],
    guide: { slope, x0: ref.x, y0: ref.y, label: `slope ${slope.toFixed(3)}` },
  });
  atomicWrite(spec.out, svg);
  return { out: spec.out, facts: { reference_slope: slope } };
}

/** Support radius against log time. */
export function renderSupportTimeline(spec: FigureSpec): RenderResult {
  const series = readSeries(need(spec, "series"));
  const svg = renderLinePlot({
    title: spec.title ?? "support radius",
    xLabel: "t",
    yLabel: "radius",
    logX: true,
    series: [{ xs: series.t, ys: series.supportRadius, color: "#d62728", label: "radius" }],
  });
  atomicWrite(spec.out, svg);
  return { out: spec.out, facts: {} };
}

/** Convergence-to-profile error curve from an experiment report. */
export function renderConvergenceError(spec: FigureSpec): RenderResult {
  const rep = readJson(need(spec, "report"));
  if (!Array.isArray(rep.errors) || !Array.isArray(rep.times)) {
    throw new ArtifactError("report lacks errors/times arrays");
  }
  const svg = renderLinePlot({
    title: spec.title ?? `distance to the cone profile (final ${Number(rep.final_error).toPrecision(3)})`,
    xLabel: "t",
    yLabel: "relative sup error",
    logX: true,
    logY: true,
    series: [{ xs: rep.times, ys: rep.errors, color: "#9467bd", label: "error" }],
  });
  atomicWrite(spec.out, svg);
  return { out: spec.out, facts: { final_error: Number(rep.final_error) } };
}

export function render(spec: FigureSpec): RenderResult {
  switch (spec.kind) {
    case "profile-surface":
      return renderProfileSurface(spec);
    case "decay-loglog":
      return renderDecayLogLog(spec);
    case "support-timeline":
      return renderSupportTimeline(spec);
    case "convergence-error":
      return renderConvergenceError(spec);
    default:
      throw new ArtifactError(`unknown figure kind ${(spec as FigureSpec).kind}`);
  }
}

/** Remove a stale temp file if a previous crash left one (best effort). */
export function cleanupTemp(out: string): void {
  try {
    rmSync(out + ".tmp");
  } catch {
    /* nothing to clean */
  }
}
