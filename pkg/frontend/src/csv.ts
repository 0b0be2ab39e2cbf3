/**
 * Parsing for the benchmark CSV schemas.
 *
 * Files start with optional `# key=value` metadata lines, then a header
 * row, then numeric rows. Schema problems are reported with the
 * offending column name so a bad hand-edit is easy to locate.
 */

import * as fs from "node:fs";

export class SchemaError extends Error {}

export interface Table {
  /** Column names in file order. */
  columns: string[];
  /** Row-major numeric cells, aligned with `columns`. */
  rows: number[][];
  /** String-valued cells for columns excluded from numeric parsing. */
  text: Map<string, string[]>;
  /** `# key=value` metadata from the file head. */
  meta: Map<string, string>;
}

/** Columns that may hold empty/non-numeric values per schema. */
const TEXT_COLUMNS = new Set(["method"]);
/** Columns that may be empty (unlabeled rows). */
const OPTIONAL_COLUMNS = new Set(["class"]);

export function parseCsv(path: string): Table {
  let raw: string;
  try {
    raw = fs.readFileSync(path, "utf8");
  } catch (err) {
    throw new SchemaError(`cannot read ${path}: ${(err as Error).message}`);
  }
  const meta = new Map<string, string>();
  const lines = raw.split(/\r?\n/).filter((line) => line.length > 0);
  let headerIndex = 0;
  for (; headerIndex < lines.length; headerIndex++) {
    const line = lines[headerIndex]!;
    if (!line.startsWith("#")) break;
    const body = line.slice(1).trim();
    const eq = body.indexOf("=");
    if (eq > 0) meta.set(body.slice(0, eq), body.slice(eq + 1));
  }
  if (headerIndex >= lines.length) {
    return { columns: [], rows: [], text: new Map(), meta };
  }
  const columns = lines[headerIndex]!.split(",");
  const rows: number[][] = [];
  const text = new Map<string, string[]>();
  for (const c of columns) {
    if (TEXT_COLUMNS.has(c)) text.set(c, []);
  }
  for (let i = headerIndex + 1; i < lines.length; i++) {
    const cells = lines[i]!.split(",");
    if (cells.length !== columns.length) {
      throw new SchemaError(
        `${path}: row ${i - headerIndex} has ${cells.length} fields, header has ${columns.length}`,
      );
    }
    const row: number[] = [];
    for (let j = 0; j < columns.length; j++) {
      const col = columns[j]!;
      const cell = cells[j]!;
      if (TEXT_COLUMNS.has(col)) {
        text.get(col)!.push(cell);
        row.push(NaN);
        continue;
      }
      if (cell === "" && OPTIONAL_COLUMNS.has(col)) {
        row.push(NaN);
        continue;
      }
      const value = Number(cell);
      if (!Number.isFinite(value)) {
        throw new SchemaError(
          `${path}: row ${i - headerIndex}, column "${col}": not a number: "${cell}"`,
        );
      }
      row.push(value);
    }
    rows.push(row);
  }
  return { columns, rows, text, meta };
}

/** Index of a required column, or a SchemaError naming it. */
export function requireColumn(table: Table, name: string, path: string): number {
  const index = table.columns.indexOf(name);
  if (index < 0) {
    throw new SchemaError(
      `${path}: missing required column "${name}" (found: ${table.columns.join(", ")})`,
    );
  }
  return index;
}

/** All columns matching a numbered prefix, e.g. o_1..o_M; in order. */
export function prefixedColumns(table: Table, prefix: string, path: string): number[] {
  const found: Array<[number, number]> = [];
  table.columns.forEach((c, i) => {
    const match = c.match(new RegExp(`^${prefix}_(\\d+)$`));
    if (match) found.push([Number(match[1]), i]);
  });
  if (found.length === 0) {
    throw new SchemaError(`${path}: no "${prefix}_<k>" columns found`);
  }
  found.sort((a, b) => a[0] - b[0]);
  found.forEach(([k], rank) => {
    if (k !== rank + 1) {
      throw new SchemaError(`${path}: "${prefix}_" columns are not contiguous from ${prefix}_1`);
    }
  });
  return found.map(([, i]) => i);
}

export function column(table: Table, index: number): number[] {
  return table.rows.map((r) => r[index]!);
}
