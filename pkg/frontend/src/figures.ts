/** The four figure kinds, each a pure function from a parsed CSV table to
 * SVG text plus any lines to print. Schemas match the producing CLI
 * commands exactly; anything else is rejected with the missing names. */

import { Table, requireColumns, numericColumn, stringColumn, SchemaError } from "./csv";
import { linearFit } from "./fit";
import { Figure, linearScale, logScale, linearTicks, logTicks, viridis, fmt } from "./svg";

export interface Rendered {
  svg: string;
  printed: string[];
}

export const KINDS = ["c-of-delta", "bbm-convergence", "failure-probe", "rho-map"] as const;
export type Kind = (typeof KINDS)[number];

const SCHEMAS: Record<Kind, string[]> = {
  "c-of-delta": ["map", "d", "n", "delta", "degree", "energy_scaled", "ratio", "flag"],
  "bbm-convergence": ["map", "d", "n", "delta", "ratio", "dirichlet", "k_estimate", "residual"],
  "failure-probe": ["map", "d", "n", "delta", "lambda", "degree", "energy_unscaled", "ratio", "flag"],
  "rho-map": ["x", "y", "z", "rho"],
};

export function render(kind: Kind, table: Table): Rendered {
  requireColumns(table, kind, SCHEMAS[kind]);
  switch (kind) {
    case "c-of-delta":
      return cOfDelta(table);
    case "bbm-convergence":
      return bbmConvergence(table);
    case "failure-probe":
      return failureProbe(table);
    case "rho-map":
      return rhoMap(table);
  }
}

function failureThreshold(d: number): number {
  return Math.sqrt(2 + 2 / (d + 1));
}

/** Empirical constant against delta, log-log, with the flat-bound line and
 * the failure threshold marked. */
function cOfDelta(table: Table): Rendered {
  const flags = stringColumn(table, "flag");
  const deltas = numericColumn(table, "delta");
  const ratios = numericColumn(table, "ratio");
  const dims = numericColumn(table, "d");
  // prefer the sweep's summary rows; fall back to per-delta maxima
  const perDelta = new Map<number, number>();
  for (let i = 0; i < flags.length; i++) {
    const useAll = !flags.includes("summary");
    if ((flags[i] === "summary" || useAll) && Number.isFinite(ratios[i]) && ratios[i] > 0) {
      perDelta.set(deltas[i], Math.max(perDelta.get(deltas[i]) ?? 0, ratios[i]));
    }
  }
  if (perDelta.size === 0) {
    // degenerate sweeps (all-zero ratios, e.g. constant-only) still render
    for (let i = 0; i < deltas.length; i++) perDelta.set(deltas[i], 0);
  }
  const pts = [...perDelta.entries()].sort((a, b) => a[0] - b[0]);
  const dim = dims.length > 0 ? dims[0] : 2;
  const ell = failureThreshold(dim);

  const fig = new Figure();
  fig.title(`empirical C(delta) = max |deg| / E_delta,  d = ${dim}`);
  const xs = pts.map((p) => p[0]);
  const ysRaw = pts.map((p) => p[1]);
  const positive = ysRaw.filter((v) => v > 0);
  const allZero = positive.length === 0;
  const x0 = Math.min(...xs) / 1.2;
  const x1 = Math.max(Math.max(...xs), ell) * 1.2;
  const sx = logScale(x0, x1, fig.innerLeft, fig.innerRight);
  let printed: string[] = [];
  if (allZero) {
    const sy = linearScale(0, 1, fig.innerBottom, fig.innerTop);
    fig.xAxis(sx, logTicks(x0, x1), "delta");
    fig.yAxis(sy, linearTicks(0, 1), "empirical C");
    fig.polyline(pts.map(([x]) => [sx(x), sy(0)] as [number, number]), "#1f77b4");
    printed = ["empirical C identically zero (degenerate population)"];
  } else {
    const y0 = Math.min(...positive) / 1.5;
    const y1 = Math.max(...positive) * 1.5;
    const sy = logScale(y0, y1, fig.innerBottom, fig.innerTop);
    fig.xAxis(sx, logTicks(x0, x1), "delta");
    fig.yAxis(sy, logTicks(y0, y1), "empirical C (log)");
    const headline = Math.max(...positive);
    if (dim === 2) {
      fig.line(fig.innerLeft, sy(headline), fig.innerRight, sy(headline), "#2ca02c", 1, "6,4");
      fig.text(fig.innerRight - 4, sy(headline) - 6, `uniform bound ${fmt(headline)}`, {
        anchor: "end",
        fill: "#2ca02c",
      });
    }
    const line = pts.filter(([, v]) => v > 0).map(([x, v]) => [sx(x), sy(v)] as [number, number]);
    fig.polyline(line, "#1f77b4");
    for (const [x, v] of pts) {
      if (v > 0) fig.circle(sx(x), sy(v), 3, "#1f77b4");
    }
    printed = [`headline empirical C: ${fmt(headline)}`];
  }
  const ex = sx(ell);
  fig.line(ex, fig.innerTop, ex, fig.innerBottom, "#d62728", 1, "4,3");
  fig.text(ex + 4, fig.innerTop + 12, `failure threshold ${fmt(ell)}`, { fill: "#d62728" });
  return { svg: fig.render(), printed };
}

/** Energy/Dirichlet ratio against delta with the linear extrapolation to
 * delta = 0; prints the intercept. */
function bbmConvergence(table: Table): Rendered {
  const deltas = numericColumn(table, "delta");
  const ratios = numericColumn(table, "ratio");
  if (deltas.length < 2) {
    throw new SchemaError("bbm-convergence needs at least two delta rows");
  }
  const fit = linearFit(deltas, ratios);
  const maps = stringColumn(table, "map");
  const fig = new Figure();
  fig.title(`small-delta limit: ${maps[0]}`);
  const x1 = Math.max(...deltas) * 1.1;
  const ys = [...ratios, fit.intercept];
  const y0 = Math.min(...ys) * 0.98;
  const y1 = Math.max(...ys) * 1.02;
  const sx = linearScale(0, x1, fig.innerLeft, fig.innerRight);
  const sy = linearScale(y0, y1, fig.innerBottom, fig.innerTop);
  fig.xAxis(sx, linearTicks(0, x1), "delta");
  fig.yAxis(sy, linearTicks(y0, y1), "E_delta / dirichlet");
  fig.polyline(
    [
      [sx(0), sy(fit.intercept)],
      [sx(x1), sy(fit.intercept + fit.slope * x1)],
    ],
    "#ff7f0e",
    1.5,
  );
  for (let i = 0; i < deltas.length; i++) {
    fig.circle(sx(deltas[i]), sy(ratios[i]), 3.5, "#1f77b4");
  }
  fig.circle(sx(0), sy(fit.intercept), 4.5, "#ff7f0e");
  fig.text(sx(0) + 8, sy(fit.intercept) - 8, `intercept ${fit.intercept.toFixed(3)}`, {
    fill: "#ff7f0e",
    size: 12,
  });
  return {
    svg: fig.render(),
    printed: [`extrapolation intercept: ${fit.intercept.toFixed(3)}`],
  };
}

/** Ratio against the concentration scale lambda in the failure regime. */
function failureProbe(table: Table): Rendered {
  const lams = numericColumn(table, "lambda");
  const ratios = numericColumn(table, "ratio");
  const maps = stringColumn(table, "map");
  const deltas = numericColumn(table, "delta");
  const fig = new Figure();
  fig.title(`failure probe at delta = ${fmt(deltas[0] ?? NaN)}`);
  const bubble: Array<{ lam: number; ratio: number }> = [];
  const reference: Array<{ map: string; ratio: number }> = [];
  for (let i = 0; i < lams.length; i++) {
    if (Number.isFinite(lams[i])) {
      bubble.push({ lam: lams[i], ratio: ratios[i] });
    } else if (Number.isFinite(ratios[i])) {
      reference.push({ map: maps[i], ratio: ratios[i] });
    }
  }
  if (bubble.length === 0) {
    throw new SchemaError("failure-probe needs at least one row with a lambda value");
  }
  bubble.sort((a, b) => a.lam - b.lam);
  const x0 = bubble[0].lam / 1.5;
  const x1 = bubble[bubble.length - 1].lam * 1.5;
  const ally = [...bubble.map((b) => b.ratio), ...reference.map((r) => r.ratio)];
  const y0 = Math.min(...ally) * 0.9;
  const y1 = Math.max(...ally) * 1.1;
  const sx = logScale(x0, x1, fig.innerLeft, fig.innerRight);
  const sy = linearScale(y0, y1, fig.innerBottom, fig.innerTop);
  fig.xAxis(sx, logTicks(x0, x1), "lambda (log)");
  fig.yAxis(sy, linearTicks(y0, y1), "|deg| / unscaled energy");
  fig.polyline(bubble.map((b) => [sx(b.lam), sy(b.ratio)] as [number, number]), "#1f77b4");
  for (const b of bubble) {
    fig.circle(sx(b.lam), sy(b.ratio), 3.5, "#1f77b4");
  }
  for (const r of reference) {
    fig.line(fig.innerLeft, sy(r.ratio), fig.innerRight, sy(r.ratio), "#7f7f7f", 1, "2,3");
    fig.text(fig.innerLeft + 4, sy(r.ratio) - 4, r.map, { fill: "#7f7f7f", size: 10 });
  }
  const trend = bubble.every((b, i) => i === 0 || b.ratio > bubble[i - 1].ratio)
    ? "monotone increasing"
    : "not monotone";
  return { svg: fig.render(), printed: [`lambda escalation: ${trend}`] };
}

/** Stopping-radius heatmap in the Hammer projection with a colorbar. */
function rhoMap(table: Table): Rendered {
  const xs = numericColumn(table, "x");
  const ys = numericColumn(table, "y");
  const zs = numericColumn(table, "z");
  const rho = numericColumn(table, "rho");
  const fig = new Figure(720, 440, { left: 30, right: 90, top: 40, bottom: 30 });
  fig.title("stopping radius rho(x)");
  const lo = Math.min(...rho);
  const hi = Math.max(...rho);
  const span = hi - lo || 1;
  const cx = (fig.innerLeft + fig.innerRight) / 2;
  const cy = (fig.innerTop + fig.innerBottom) / 2;
  const sxr = (fig.innerRight - fig.innerLeft) / (2 * 2 * Math.SQRT2);
  const syr = (fig.innerBottom - fig.innerTop) / (2 * Math.SQRT2);
  const s = Math.min(sxr, syr);
  for (let i = 0; i < xs.length; i++) {
    const lon = Math.atan2(ys[i], xs[i]);
    const lat = Math.asin(Math.min(Math.max(zs[i], -1), 1));
    const den = Math.sqrt(1 + Math.cos(lat) * Math.cos(lon / 2));
    const hx = (2 * Math.SQRT2 * Math.cos(lat) * Math.sin(lon / 2)) / den;
    const hy = (Math.SQRT2 * Math.sin(lat)) / den;
    fig.circle(cx + s * hx, cy - s * hy, 2.2, viridis((rho[i] - lo) / span));
  }
  // colorbar
  const bx = fig.innerRight + 24;
  const steps = 64;
  const bh = fig.innerBottom - fig.innerTop;
  for (let i = 0; i < steps; i++) {
    const y0 = fig.innerBottom - ((i + 1) / steps) * bh;
    fig.add(
      `<rect x="${bx}" y="${y0.toFixed(2)}" width="14" height="${(bh / steps + 0.5).toFixed(2)}" ` +
        `fill="${viridis((i + 0.5) / steps)}"/>`,
    );
  }
  for (const t of [0, 0.5, 1]) {
    const y = fig.innerBottom - t * bh;
    fig.text(bx + 18, y + 4, fmt(lo + t * span), { size: 10 });
  }
  return {
    svg: fig.render(),
    printed: [`rho range [${fmt(lo)}, ${fmt(hi)}] over ${xs.length} points`],
  };
}
