/** Deterministic SVG scene building: fixed styles, fixed precision, no
 * randomness or environment lookups, so a given input always produces the
 * same bytes. */

export type Scale = (v: number) => number;

export function fmt(v: number): string {
  if (!Number.isFinite(v)) return String(v);
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(2);
  return String(Number(v.toPrecision(6)));
}

const px = (v: number): string => v.toFixed(2);

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function logScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const l0 = Math.log10(d0);
  const span = Math.log10(d1) - l0 || 1;
  return (v) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0);
}

/** 1-2-5 ticks covering [lo, hi]. */
export function linearTicks(lo: number, hi: number, target = 6): number[] {
  const span = hi - lo || 1;
  const raw = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= target) ?? 10 * mag;
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) {
    out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return out;
}

/** Decade ticks on [lo, hi]; 1-2-5 within a decade when the span is short. */
export function logTicks(lo: number, hi: number): number[] {
  const e0 = Math.floor(Math.log10(lo));
  const e1 = Math.ceil(Math.log10(hi));
  const out: number[] = [];
  const mantissas = e1 - e0 <= 1 ? [1, 2, 5] : [1];
  for (let e = e0; e <= e1; e++) {
    for (const m of mantissas) {
      const v = m * Math.pow(10, e);
      if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) out.push(v);
    }
  }
  return out.length >= 2 ? out : [lo, hi];
}

export interface Margins {
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export class Figure {
  readonly width: number;
  readonly height: number;
  readonly margins: Margins;
  private parts: string[] = [];

  constructor(width = 640, height = 440, margins?: Partial<Margins>) {
    this.width = width;
    this.height = height;
    this.margins = { left: 66, right: 24, top: 40, bottom: 50, ...margins };
  }

  get innerLeft(): number {
    return this.margins.left;
  }
  get innerRight(): number {
    return this.width - this.margins.right;
  }
  get innerTop(): number {
    return this.margins.top;
  }
  get innerBottom(): number {
    return this.height - this.margins.bottom;
  }

  add(part: string): void {
    this.parts.push(part);
  }

  title(text: string): void {
    this.add(
      `<text x="${px(this.width / 2)}" y="22" text-anchor="middle" ` +
        `font-size="15" font-weight="bold">${escapeXml(text)}</text>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1, dash = ""): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.add(
      `<line x1="${px(x1)}" y1="${px(y1)}" x2="${px(x2)}" y2="${px(y2)}" ` +
        `stroke="${stroke}" stroke-width="${width}"${d}/>`,
    );
  }

  polyline(pts: Array<[number, number]>, stroke: string, width = 1.5): void {
    const d = pts.map(([x, y]) => `${px(x)},${px(y)}`).join(" ");
    this.add(`<polyline points="${d}" fill="none" stroke="${stroke}" stroke-width="${width}"/>`);
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.add(`<circle cx="${px(x)}" cy="${px(y)}" r="${px(r)}" fill="${fill}"/>`);
  }

  text(x: number, y: number, content: string, opts: { anchor?: string; size?: number; fill?: string; rotate?: number } = {}): void {
    const anchor = opts.anchor ?? "start";
    const size = opts.size ?? 11;
    const fill = opts.fill ?? "#000";
    const rot = opts.rotate ? ` transform="rotate(${opts.rotate} ${px(x)} ${px(y)})"` : "";
    this.add(
      `<text x="${px(x)}" y="${px(y)}" text-anchor="${anchor}" font-size="${size}" ` +
        `fill="${fill}"${rot}>${escapeXml(content)}</text>`,
    );
  }

  xAxis(scale: Scale, ticks: number[], label: string): void {
    const y = this.innerBottom;
    this.line(this.innerLeft, y, this.innerRight, y, "#000");
    for (const t of ticks) {
      const x = scale(t);
      this.line(x, y, x, y + 5, "#000");
      this.line(x, this.innerTop, x, y, "#ddd", 0.5);
      this.text(x, y + 18, fmt(t), { anchor: "middle" });
    }
    this.text((this.innerLeft + this.innerRight) / 2, this.height - 12, label, {
      anchor: "middle",
      size: 12,
    });
  }

  yAxis(scale: Scale, ticks: number[], label: string): void {
    const x = this.innerLeft;
    this.line(x, this.innerTop, x, this.innerBottom, "#000");
    for (const t of ticks) {
      const y = scale(t);
      this.line(x - 5, y, x, y, "#000");
      this.line(x, y, this.innerRight, y, "#ddd", 0.5);
      this.text(x - 8, y + 4, fmt(t), { anchor: "end" });
    }
    this.text(16, (this.innerTop + this.innerBottom) / 2, label, {
      anchor: "middle",
      size: 12,
      rotate: -90,
    });
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}" ` +
      `font-family="Helvetica, Arial, sans-serif">\n` +
      `<rect width="${this.width}" height="${this.height}" fill="#fff"/>\n` +
      this.parts.join("\n") +
      `\n</svg>\n`
    );
  }
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

// Sixteen viridis stops; linear interpolation in between.
const VIRIDIS: Array<[number, number, number]> = [
  [68, 1, 84], [72, 26, 108], [71, 47, 125], [65, 68, 135],
  [57, 86, 140], [49, 104, 142], [42, 120, 142], [35, 136, 142],
  [31, 152, 139], [34, 168, 132], [53, 183, 121], [84, 197, 104],
  [122, 209, 81], [165, 219, 54], [210, 226, 27], [253, 231, 37],
];

export function viridis(t: number): string {
  const u = Math.min(Math.max(t, 0), 1) * (VIRIDIS.length - 1);
  const i = Math.min(Math.floor(u), VIRIDIS.length - 2);
  const f = u - i;
  const c = VIRIDIS[i].map((a, k) => Math.round(a + f * (VIRIDIS[i + 1][k] - a)));
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}
