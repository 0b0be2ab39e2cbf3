/**
 * Minimal deterministic SVG construction: explicit attribute order,
 * fixed coordinate precision, no timestamps. Rendering the same inputs
 * twice yields byte-identical markup.
 */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const DEFAULT_MARGIN: Margin = { top: 34, right: 16, bottom: 40, left: 52 };

/** Class color cycle shared by every figure kind. */
export const PALETTE = ["#3b6fb6", "#c8552c", "#4e9352", "#8458a5", "#ba7c21", "#5b5b5b"];

export function fmt(x: number): string {
  if (!Number.isFinite(x)) throw new Error(`non-finite coordinate: ${x}`);
  const r = Math.round(x * 100) / 100;
  return Object.is(r, -0) ? "0" : String(r);
}

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function tag(name: string, attrs: Record<string, string | number>, body = ""): string {
  const rendered = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : esc(v)}"`)
    .join(" ");
  return body === "" ? `<${name} ${rendered}/>` : `<${name} ${rendered}>${body}</${name}>`;
}

export function text(x: number, y: number, body: string, attrs: Record<string, string | number> = {}): string {
  return tag("text", { x: fmt(x), y: fmt(y), "font-family": "sans-serif", ...attrs }, esc(body));
}

export function polyline(points: Array<[number, number]>, attrs: Record<string, string | number>): string {
  const p = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  return tag("polyline", { points: p, fill: "none", ...attrs });
}

export function polygon(points: Array<[number, number]>, attrs: Record<string, string | number>): string {
  const p = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  return tag("polygon", { points: p, ...attrs });
}

export function document(width: number, height: number, body: string[]): string {
  const head = `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`;
  const background = tag("rect", { x: 0, y: 0, width, height, fill: "#ffffff" });
  return `${head}\n${background}\n${body.join("\n")}\n</svg>\n`;
}

/** Affine map from a data interval onto a pixel interval. */
export class LinearScale {
  constructor(
    readonly d0: number,
    readonly d1: number,
    readonly r0: number,
    readonly r1: number,
  ) {
    if (d1 === d0) throw new Error("degenerate scale domain");
  }

  apply(x: number): number {
    return this.r0 + ((x - this.d0) / (this.d1 - this.d0)) * (this.r1 - this.r0);
  }

  /** Round-numbered tick positions covering the domain. */
  ticks(count = 5): number[] {
    const span = Math.abs(this.d1 - this.d0);
    const step = niceStep(span / Math.max(1, count));
    const lo = Math.ceil(Math.min(this.d0, this.d1) / step) * step;
    const hi = Math.max(this.d0, this.d1);
    const out: number[] = [];
    for (let v = lo; v <= hi + 1e-9; v += step) {
      out.push(Math.abs(v) < step * 1e-9 ? 0 : Number(v.toPrecision(12)));
    }
    return out;
  }
}

function niceStep(raw: number): number {
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const unit = raw / mag;
  if (unit <= 1) return mag;
  if (unit <= 2) return 2 * mag;
  if (unit <= 5) return 5 * mag;
  return 10 * mag;
}

export interface Frame {
  width: number;
  height: number;
  margin: Margin;
  x: LinearScale;
  y: LinearScale;
}

export function makeFrame(
  width: number,
  height: number,
  xDomain: [number, number],
  yDomain: [number, number],
  margin: Margin = DEFAULT_MARGIN,
): Frame {
  const x = new LinearScale(xDomain[0], xDomain[1], margin.left, width - margin.right);
  const y = new LinearScale(yDomain[0], yDomain[1], height - margin.bottom, margin.top);
  return { width, height, margin, x, y };
}

/** Axis lines, ticks and numeric labels for a frame. */
export function axes(frame: Frame, xLabel: string, yLabel: string): string[] {
  const { x, y, width, height, margin } = frame;
  const parts: string[] = [];
  const axisColor = "#444444";
  const x0 = margin.left;
  const x1 = width - margin.right;
  const yPix = height - margin.bottom;
  parts.push(tag("line", { x1: x0, y1: yPix, x2: x1, y2: yPix, stroke: axisColor }));
  parts.push(tag("line", { x1: x0, y1: yPix, x2: x0, y2: margin.top, stroke: axisColor }));
  for (const v of x.ticks()) {
    const px = x.apply(v);
    if (px < x0 - 0.5 || px > x1 + 0.5) continue;
    parts.push(tag("line", { x1: px, y1: yPix, x2: px, y2: yPix + 4, stroke: axisColor }));
    parts.push(text(px, yPix + 16, trimNumber(v), { "font-size": "10", "text-anchor": "middle", fill: axisColor }));
  }
  for (const v of y.ticks()) {
    const py = y.apply(v);
    if (py > yPix + 0.5 || py < margin.top - 0.5) continue;
    parts.push(tag("line", { x1: x0 - 4, y1: py, x2: x0, y2: py, stroke: axisColor }));
    parts.push(text(x0 - 7, py + 3, trimNumber(v), { "font-size": "10", "text-anchor": "end", fill: axisColor }));
  }
  parts.push(text((x0 + x1) / 2, height - 8, xLabel, { "font-size": "12", "text-anchor": "middle", fill: "#222222" }));
  parts.push(
    tag(
      "g",
      { transform: `translate(14 ${(yPix + margin.top) / 2}) rotate(-90)` },
      text(0, 0, yLabel, { "font-size": "12", "text-anchor": "middle", fill: "#222222" }),
    ),
  );
  return parts;
}

export function title(frame: Frame, body: string): string {
  return text(frame.width / 2, 18, body, {
    "font-size": "13",
    "text-anchor": "middle",
    fill: "#111111",
    "font-weight": "bold",
  });
}

function trimNumber(v: number): string {
  const s = String(v);
  return s.includes(".") ? String(Number(v.toFixed(6))) : s;
}
