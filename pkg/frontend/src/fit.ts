/** Ordinary least squares for y = intercept + slope * x. */

export interface LinearFit {
  intercept: number;
  slope: number;
  maxResidual: number;
}

export function linearFit(x: number[], y: number[]): LinearFit {
  const n = x.length;
  if (n < 2 || y.length !== n) {
    throw new Error(`linearFit needs two same-length samples, got ${n}/${y.length}`);
  }
  const mx = x.reduce((a, b) => a + b, 0) / n;
  const my = y.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx === 0) {
    throw new Error("linearFit: degenerate x values");
  }
  const slope = sxy / sxx;
  const intercept = my - slope * mx;
  let maxResidual = 0;
  for (let i = 0; i < n; i++) {
    maxResidual = Math.max(maxResidual, Math.abs(intercept + slope * x[i] - y[i]));
  }
  return { intercept, slope, maxResidual };
}
