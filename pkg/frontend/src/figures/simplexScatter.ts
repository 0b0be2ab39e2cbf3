/**
 * Scatter of classifier outputs on the probability triangle.
 *
 * Three-class files draw the classic barycentric view; other class
 * counts fall back to per-component marginal histograms, which stay
 * readable at any dimension.
 */

import { project, triangleInBox } from "../barycentric.js";
import { column, parseCsv, prefixedColumns, requireColumn } from "../csv.js";
import type { FigureOptions } from "../spec.js";
import { PALETTE, document, fmt, polyline, tag, text } from "../svg.js";
import { histogramPanels } from "./posteriorHist.js";

export function renderSimplexScatter(input: string, options: FigureOptions): string {
  const table = parseCsv(input);
  const classIdx = requireColumn(table, "class", input);
  const obsIdx = prefixedColumns(table, "o", input);
  if (obsIdx.length !== 3) {
    const series = obsIdx.map((idx, j) => ({
      name: `o_${j + 1}`,
      values: column(table, idx),
    }));
    return histogramPanels(series, options, "component probability");
  }

  const { width, height } = options;
  const pad = 46;
  const tri = triangleInBox(pad, pad, width - 2 * pad, height - 2 * pad);
  const parts: string[] = [];
  parts.push(
    polyline(
      [
        [tri.v1.x, tri.v1.y],
        [tri.v2.x, tri.v2.y],
        [tri.v3.x, tri.v3.y],
        [tri.v1.x, tri.v1.y],
      ],
      { stroke: "#333333", "stroke-width": "1.2" },
    ),
  );
  const labels: Array<[number, number, string, string]> = [
    [tri.v1.x - 8, tri.v1.y + 16, "o_1", "middle"],
    [tri.v2.x + 8, tri.v2.y + 16, "o_2", "middle"],
    [tri.v3.x, tri.v3.y - 8, "o_3", "middle"],
  ];
  for (const [x, y, label, anchor] of labels) {
    parts.push(text(x, y, label, { "font-size": "11", "text-anchor": anchor, fill: "#333333" }));
  }

  const classes = column(table, classIdx);
  for (let i = 0; i < table.rows.length; i++) {
    const row = table.rows[i]!;
    const p = project(tri, row[obsIdx[0]!]!, row[obsIdx[1]!]!, row[obsIdx[2]!]!);
    const cls = classes[i]!;
    const color = Number.isNaN(cls) ? "#999999" : PALETTE[(cls - 1) % PALETTE.length]!;
    parts.push(
      tag("circle", { cx: fmt(p.x), cy: fmt(p.y), r: "3", fill: color, "fill-opacity": "0.75" }),
    );
  }

  const seen = [...new Set(classes.filter((c) => !Number.isNaN(c)))].sort((a, b) => a - b);
  seen.forEach((cls, k) => {
    const y = pad + 14 * k;
    parts.push(tag("circle", { cx: fmt(width - pad + 18), cy: fmt(y - 3), r: "4", fill: PALETTE[(cls - 1) % PALETTE.length]! }));
    parts.push(text(width - pad + 26, y, `class ${cls}`, { "font-size": "10", fill: "#333333" }));
  });
  if (options.title) {
    parts.push(text(width / 2, 20, options.title, { "font-size": "13", "text-anchor": "middle", "font-weight": "bold", fill: "#111111" }));
  }
  return document(width, height, parts);
}
