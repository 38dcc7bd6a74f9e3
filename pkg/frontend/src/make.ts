/** Hash-keyed regeneration: a figure is re-rendered only when one of its
 *  input artifacts changed (sha256), preventing stale plots without
 *  rebuilding everything. State lives in a small JSON next to the plan. */

import { createHash } from "crypto";
import { existsSync, readFileSync, writeFileSync } from "fs";
import { render } from "./figures.js";
import type { FigureSpec } from "./types.js";

interface MakeState {
  [out: string]: { inputs: Record<string, string> };
}

export function hashFile(path: string): string {
  return createHash("sha256").update(readFileSync(path)).digest("hex");
}

export function loadPlan(path: string): FigureSpec[] {
  const plan = JSON.parse(readFileSync(path, "utf8"));
  if (!Array.isArray(plan)) throw new Error("figure plan must be a JSON array");
  return plan as FigureSpec[];
}

export function makeFigures(plan: FigureSpec[], statePath: string):
    { rendered: string[]; skipped: string[] } {
  let state: MakeState = {};
  if (existsSync(statePath)) {
    state = JSON.parse(readFileSync(statePath, "utf8"));
  }
  const rendered: string[] = [];
  const skipped: string[] = [];
  for (const spec of plan) {
    const hashes: Record<string, string> = {};
    for (const [role, path] of Object.entries(spec.inputs)) {
      hashes[role] = hashFile(path);
    }
    const prev = state[spec.out];
    const fresh = existsSync(spec.out) && prev &&
      JSON.stringify(prev.inputs) === JSON.stringify(hashes);
    if (fresh) {
      skipped.push(spec.out);
      continue;
    }
    render(spec);
    state[spec.out] = { inputs: hashes };
    rendered.push(spec.out);
  }
  writeFileSync(statePath, JSON.stringify(state, null, 2) + "\n");
  return { rendered, skipped };
}
