/**
 * Small-multiple histograms of retained posterior samples, one panel
 * per parameter, with optional vertical truth markers.
 */

import { column, parseCsv } from "../csv.js";
import type { FigureOptions } from "../spec.js";
import { DEFAULT_MARGIN, LinearScale, PALETTE, document, fmt, tag, text } from "../svg.js";

export interface Series {
  name: string;
  values: number[];
  truth?: number;
}

export function renderPosteriorHist(input: string, options: FigureOptions): string {
  const table = parseCsv(input);
  const skip = new Set(["sample", "log_posterior"]);
  const names = table.columns.filter((c) => !skip.has(c));
  if (names.length === 0) {
    throw new Error(`${input}: no parameter columns to plot`);
  }
  const series: Series[] = names.map((name) => ({
    name,
    values: column(table, table.columns.indexOf(name)),
  }));
  for (const [j, s] of series.entries()) {
    const match = s.name.match(/^theta_(\d+)$/);
    if (match && options.truth) {
      const idx = Number(match[1]) - 1;
      if (idx < options.truth.length) s.truth = options.truth[idx];
    }
    void j;
  }
  return histogramPanels(series, options, "value");
}

/** Layout shared with the high-dimension scatter fallback. */
export function histogramPanels(series: Series[], options: FigureOptions, xLabel: string): string {
  const { width, height, bins } = options;
  const cols = Math.min(3, series.length);
  const rows = Math.ceil(series.length / cols);
  const panelW = width / cols;
  const panelH = (height - (options.title ? 26 : 6)) / rows;
  const top0 = options.title ? 26 : 6;
  const parts: string[] = [];
  if (options.title) {
    parts.push(text(width / 2, 18, options.title, { "font-size": "13", "text-anchor": "middle", "font-weight": "bold", fill: "#111111" }));
  }
  series.forEach((s, index) => {
    const cx = index % cols;
    const cy = Math.floor(index / cols);
    parts.push(
      panel(s, panelW * cx, top0 + panelH * cy, panelW, panelH, PALETTE[index % PALETTE.length]!, xLabel, bins),
    );
  });
  return document(width, height, parts);
}

function panel(
  s: Series,
  left: number,
  top: number,
  w: number,
  h: number,
  color: string,
  xLabel: string,
  bins: number,
): string {
  if (s.values.length === 0) throw new Error(`no samples for ${s.name}`);
  let lo = Math.min(...s.values);
  let hi = Math.max(...s.values);
  if (s.truth !== undefined) {
    lo = Math.min(lo, s.truth);
    hi = Math.max(hi, s.truth);
  }
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = hi - lo > 0 ? (hi - lo) * 0.03 : 0.5;
  lo -= pad;
  hi += pad;
  const counts = new Array<number>(bins).fill(0);
  for (const v of s.values) {
    let b = Math.floor(((v - lo) / (hi - lo)) * bins);
    if (b >= bins) b = bins - 1;
    if (b < 0) b = 0;
    counts[b] = counts[b]! + 1;
  }
  const peak = Math.max(...counts);
  const margin = { ...DEFAULT_MARGIN, left: 40, right: 10, top: 22, bottom: 32 };
  const x = new LinearScale(lo, hi, left + margin.left, left + w - margin.right);
  const y = new LinearScale(0, peak, top + h - margin.bottom, top + margin.top);
  const parts: string[] = [];
  const base = top + h - margin.bottom;
  for (let b = 0; b < bins; b++) {
    if (counts[b] === 0) continue;
    const x0 = x.apply(lo + ((hi - lo) * b) / bins);
    const x1 = x.apply(lo + ((hi - lo) * (b + 1)) / bins);
    const yTop = y.apply(counts[b]!);
    parts.push(
      tag("rect", {
        x: fmt(x0),
        y: fmt(yTop),
        width: fmt(Math.max(0.4, x1 - x0 - 0.4)),
        height: fmt(base - yTop),
        fill: color,
        "fill-opacity": "0.8",
      }),
    );
  }
  parts.push(tag("line", { x1: fmt(left + margin.left), y1: fmt(base), x2: fmt(left + w - margin.right), y2: fmt(base), stroke: "#444444" }));
  for (const v of x.ticks(4)) {
    const px = x.apply(v);
    if (px < left + margin.left - 0.5 || px > left + w - margin.right + 0.5) continue;
    parts.push(tag("line", { x1: fmt(px), y1: fmt(base), x2: fmt(px), y2: fmt(base + 4), stroke: "#444444" }));
    parts.push(text(px, base + 15, String(Number(v.toPrecision(6))), { "font-size": "9", "text-anchor": "middle", fill: "#444444" }));
  }
  if (s.truth !== undefined) {
    const px = x.apply(s.truth);
    parts.push(tag("line", {
      x1: fmt(px), y1: fmt(base), x2: fmt(px), y2: fmt(top + margin.top),
      stroke: "#111111", "stroke-dasharray": "4 3", "stroke-width": "1.2",
    }));
  }
  parts.push(text(left + w / 2, top + 14, s.name, { "font-size": "11", "text-anchor": "middle", fill: "#222222" }));
  parts.push(text(left + w / 2, top + h - 6, xLabel, { "font-size": "9", "text-anchor": "middle", fill: "#555555" }));
  return tag("g", { "data-panel": s.name }, parts.join(""));
}
