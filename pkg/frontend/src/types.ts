/** Schemas of the simulation artifacts this package consumes (read-only). */

export interface Manifest {
  mode: string;
  params: { p: number; q: number; dim: number };
  derived: {
    q1: number;
    q_star: number;
    q2: number;
    xi: number;
    eta: number;
    a0: number | null;
    decay_exp: number;
    wait_exp: number | null;
  };
  grid: { dim: number; extent: number; cells: number; dx: number };
  eps_pos: number;
  status: string;
  aborted: boolean;
  snapshot_times: number[];
  artifacts: string[];
}

/** Columns of series.csv, one array per column. */
export interface Series {
  t: number[];
  tau: number[];
  l1: number[];
  linf: number[];
  lipschitz: number[];
  supportRadius: number[];
  dt: number[];
  clampCount: number[];
}

/** A scalar field on a uniform grid (1D length n, 2D row-major n*n). */
export interface FieldData {
  dim: number;
  cells: number;
  dx: number;
  extent: number;
  values: Float64Array;
}

export type FigureKind =
  | "profile-surface"
  | "decay-loglog"
  | "support-timeline"
  | "convergence-error";

/** What to draw and from which files; never recomputes physics. */
export interface FigureSpec {
  kind: FigureKind;
  /** inputs by role; see figures.ts for the roles each kind requires */
  inputs: Record<string, string>;
  out: string;
  /** cone exponent q for profile surfaces (annotation + fit target) */
  q?: number;
  title?: string;
}
