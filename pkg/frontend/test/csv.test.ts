import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { describe, expect, it } from "vitest";

import { SchemaError, parseCsv, prefixedColumns, requireColumn } from "../src/csv.js";

function tempFile(body: string): string {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "csv-"));
  const file = path.join(dir, "t.csv");
  fs.writeFileSync(file, body);
  return file;
}

describe("parseCsv", () => {
  it("reads metadata, header and numeric rows", () => {
    const file = tempFile("# version=0.1.0\n# config_hash=abc\nstep,p_1,p_2\n1,0.25,0.75\n2,0.5,0.5\n");
    const table = parseCsv(file);
    expect(table.meta.get("version")).toBe("0.1.0");
    expect(table.columns).toEqual(["step", "p_1", "p_2"]);
    expect(table.rows).toEqual([
      [1, 0.25, 0.75],
      [2, 0.5, 0.5],
    ]);
  });

  it("keeps method cells as text", () => {
    const file = tempFile("method,N,rate\nssbf,1,0.5\nhbni,1,0.25\n");
    const table = parseCsv(file);
    expect(table.text.get("method")).toEqual(["ssbf", "hbni"]);
  });

  it("allows empty class cells for unlabeled rows", () => {
    const file = tempFile("class,o_1,o_2\n,0.5,0.5\n");
    const table = parseCsv(file);
    expect(Number.isNaN(table.rows[0]![0])).toBe(true);
  });

  it("names the offending column on a bad cell", () => {
    const file = tempFile("step,p_1\n1,zap\n");
    expect(() => parseCsv(file)).toThrowError(/column "p_1".*"zap"/);
  });

  it("rejects ragged rows", () => {
    const file = tempFile("a,b\n1\n");
    expect(() => parseCsv(file)).toThrowError(SchemaError);
  });

  it("reports missing required columns by name", () => {
    const file = tempFile("a,b\n1,2\n");
    const table = parseCsv(file);
    expect(() => requireColumn(table, "rate", file)).toThrowError(/missing required column "rate"/);
  });

  it("collects contiguous numbered columns", () => {
    const file = tempFile("class,o_1,o_2,o_3\n1,0.2,0.3,0.5\n");
    const table = parseCsv(file);
    expect(prefixedColumns(table, "o", file)).toEqual([1, 2, 3]);
  });

  it("rejects gaps in numbered columns", () => {
    const file = tempFile("class,o_1,o_3\n1,0.5,0.5\n");
    const table = parseCsv(file);
    expect(() => prefixedColumns(table, "o", file)).toThrowError(/not contiguous/);
  });
});
