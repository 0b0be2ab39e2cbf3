/**
 * Filter posterior over time: one probability line per class along the
 * observation stream.
 */

import { column, parseCsv, prefixedColumns, requireColumn } from "../csv.js";
import type { FigureOptions } from "../spec.js";
import { PALETTE, axes, document, makeFrame, polyline, tag, text, title } from "../svg.js";

export function renderPosteriorTrace(input: string, options: FigureOptions): string {
  const table = parseCsv(input);
  const stepIdx = requireColumn(table, "step", input);
  const probIdx = prefixedColumns(table, "p", input);
  const steps = column(table, stepIdx);
  const frame = makeFrame(
    options.width,
    options.height,
    [steps.length ? Math.min(...steps) : 0, steps.length ? Math.max(...steps, 2) : 1],
    [0, 1.02],
  );
  const parts: string[] = [];
  probIdx.forEach((idx, k) => {
    const color = PALETTE[k % PALETTE.length]!;
    const values = column(table, idx);
    if (steps.length > 0) {
      parts.push(
        polyline(
          steps.map((s, i) => [frame.x.apply(s), frame.y.apply(values[i]!)]),
          { stroke: color, "stroke-width": "1.6" },
        ),
      );
    }
    const lx = options.width - frame.margin.right - 110;
    const ly = frame.margin.top + 16 * k + 4;
    parts.push(tag("line", { x1: lx, y1: ly - 4, x2: lx + 18, y2: ly - 4, stroke: color, "stroke-width": "2" }));
    parts.push(text(lx + 24, ly, `class ${k + 1}`, { "font-size": "11", fill: "#222222" }));
  });
  parts.push(...axes(frame, "observation step", "posterior probability"));
  if (options.title) parts.push(title(frame, options.title));
  return document(options.width, options.height, parts);
}
