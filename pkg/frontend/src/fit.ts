/** Least-squares fit of log(y) against log(x) on positive samples. */

export interface LogLogFit {
  exponent: number;
  amplitude: number;
  rSquared: number;
  points: number;
}

export function fitLogLog(xs: ArrayLike<number>, ys: ArrayLike<number>,
                          xmin = -Infinity, xmax = Infinity): LogLogFit {
  const lx: number[] = [];
  const ly: number[] = [];
  for (let i = 0; i < xs.length; i++) {
    const x = xs[i];
    const y = ys[i];
    if (x > 0 && y > 0 && x >= xmin && x <= xmax) {
      lx.push(Math.log(x));
      ly.push(Math.log(y));
    }
  }
  const n = lx.length;
  if (n < 3) throw new Error(`log-log fit needs at least 3 positive points, got ${n}`);
  const mx = lx.reduce((a, b) => a + b, 0) / n;
  const my = ly.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  let syy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (lx[i] - mx) ** 2;
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) ** 2;
  }
  const slope = sxy / sxx;
  const intercept = my - slope * mx;
  let ssRes = 0;
  for (let i = 0; i < n; i++) ssRes += (ly[i] - (slope * lx[i] + intercept)) ** 2;
  return {
    exponent: slope,
    amplitude: Math.exp(intercept),
    rSquared: syy > 0 ? 1 - ssRes / syy : 1,
    points: n,
  };
}

/** Radial power-law exponent of a cone profile: fit value against distance
 *  (distance field supplied by the profile artifacts), using the mid-range
 *  of distances where both discretization floors are irrelevant. */
export function coneExponentFit(dist: ArrayLike<number>, value: ArrayLike<number>): LogLogFit {
  let dmax = 0;
  for (let i = 0; i < dist.length; i++) if (dist[i] > dmax) dmax = dist[i];
  return fitLogLog(dist, value, 0.2 * dmax, 0.9 * dmax);
}
