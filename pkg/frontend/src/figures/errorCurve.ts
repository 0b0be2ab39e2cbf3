/**
 * Misclassification rate against history length, one line per method
 * with its confidence band.
 */

import { column, parseCsv, requireColumn } from "../csv.js";
import type { FigureOptions } from "../spec.js";
import { PALETTE, axes, document, makeFrame, polygon, polyline, tag, text, title } from "../svg.js";

export function renderErrorCurve(input: string, options: FigureOptions): string {
  const table = parseCsv(input);
  const methodCol = requireColumn(table, "method", input);
  const nIdx = requireColumn(table, "N", input);
  const rateIdx = requireColumn(table, "rate", input);
  const loIdx = requireColumn(table, "ci_lo", input);
  const hiIdx = requireColumn(table, "ci_hi", input);
  void methodCol;
  const methods = table.text.get("method")!;
  if (methods.length !== table.rows.length) {
    throw new Error(`${input}: method column length mismatch`);
  }

  const ns = column(table, nIdx);
  const byMethod = new Map<string, Array<{ n: number; rate: number; lo: number; hi: number }>>();
  table.rows.forEach((row, i) => {
    const m = methods[i]!;
    if (!byMethod.has(m)) byMethod.set(m, []);
    byMethod.get(m)!.push({ n: row[nIdx]!, rate: row[rateIdx]!, lo: row[loIdx]!, hi: row[hiIdx]! });
  });
  for (const pts of byMethod.values()) pts.sort((a, b) => a.n - b.n);

  const maxRate = Math.max(...table.rows.map((r) => r[hiIdx]!), 0.01);
  const frame = makeFrame(
    options.width,
    options.height,
    [Math.min(...ns), Math.max(...ns)],
    [0, maxRate * 1.05],
  );
  const parts: string[] = [];
  const names = [...byMethod.keys()];
  names.forEach((name, k) => {
    const color = PALETTE[k % PALETTE.length]!;
    const pts = byMethod.get(name)!;
    const band: Array<[number, number]> = [
      ...pts.map((p) => [frame.x.apply(p.n), frame.y.apply(p.hi)] as [number, number]),
      ...[...pts].reverse().map((p) => [frame.x.apply(p.n), frame.y.apply(p.lo)] as [number, number]),
    ];
    parts.push(polygon(band, { fill: color, "fill-opacity": "0.15", stroke: "none" }));
    parts.push(
      polyline(
        pts.map((p) => [frame.x.apply(p.n), frame.y.apply(p.rate)]),
        { stroke: color, "stroke-width": "1.6" },
      ),
    );
    const lx = options.width - frame.margin.right - 150;
    const ly = frame.margin.top + 16 * k + 4;
    parts.push(tag("line", { x1: lx, y1: ly - 4, x2: lx + 18, y2: ly - 4, stroke: color, "stroke-width": "2" }));
    parts.push(text(lx + 24, ly, name, { "font-size": "11", fill: "#222222" }));
  });
  parts.push(...axes(frame, "observations N", "misclassification rate"));
  if (options.title) parts.push(title(frame, options.title));
  return document(options.width, options.height, parts);
}
