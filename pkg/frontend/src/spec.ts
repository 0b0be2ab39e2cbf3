/**
 * Figure specification: what to draw, from which file, to where.
 */

import * as fs from "node:fs";

export const KINDS = ["simplex-scatter", "posterior-hist", "error-curve", "posterior-trace"] as const;
export type FigureKind = (typeof KINDS)[number];

export class SpecError extends Error {}

export interface FigureOptions {
  width: number;
  height: number;
  title?: string;
  /** Vertical reference lines for posterior histograms, by parameter index. */
  truth?: number[];
  /** Histogram bin count. */
  bins: number;
}

export interface FigureSpec {
  kind: FigureKind;
  input: string;
  output: string;
  options: FigureOptions;
}

const DEFAULTS = { width: 640, height: 440, bins: 40 };

export function parseSpec(doc: unknown, specDir: string): FigureSpec {
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new SpecError("spec must be a JSON object");
  }
  const rec = doc as Record<string, unknown>;
  const kind = rec["kind"];
  if (typeof kind !== "string" || !(KINDS as readonly string[]).includes(kind)) {
    throw new SpecError(`spec.kind must be one of ${KINDS.join(", ")}; got ${JSON.stringify(kind)}`);
  }
  const input = rec["input"];
  const output = rec["output"];
  if (typeof input !== "string" || input.length === 0) throw new SpecError("spec.input must be a path");
  if (typeof output !== "string" || output.length === 0) throw new SpecError("spec.output must be a path");
  const raw = (rec["options"] ?? {}) as Record<string, unknown>;
  if (typeof raw !== "object" || raw === null) throw new SpecError("spec.options must be an object");
  const options: FigureOptions = {
    width: numberOr(raw["width"], DEFAULTS.width, "options.width"),
    height: numberOr(raw["height"], DEFAULTS.height, "options.height"),
    bins: numberOr(raw["bins"], DEFAULTS.bins, "options.bins"),
  };
  if (raw["title"] !== undefined) {
    if (typeof raw["title"] !== "string") throw new SpecError("options.title must be a string");
    options.title = raw["title"];
  }
  if (raw["truth"] !== undefined) {
    const truth = raw["truth"];
    if (!Array.isArray(truth) || truth.some((v) => typeof v !== "number")) {
      throw new SpecError("options.truth must be an array of numbers");
    }
    options.truth = truth as number[];
  }
  const resolve = (p: string) => (p.startsWith("/") ? p : `${specDir}/${p}`);
  return { kind: kind as FigureKind, input: resolve(input), output: resolve(output), options };
}

export function loadSpec(path: string): FigureSpec {
  let raw: string;
  try {
    raw = fs.readFileSync(path, "utf8");
  } catch (err) {
    throw new SpecError(`cannot read spec ${path}: ${(err as Error).message}`);
  }
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch (err) {
    throw new SpecError(`spec ${path} is not valid JSON: ${(err as Error).message}`);
  }
  const dir = path.includes("/") ? path.slice(0, path.lastIndexOf("/")) : ".";
  return parseSpec(doc, dir);
}

function numberOr(value: unknown, fallback: number, label: string): number {
  if (value === undefined) return fallback;
  if (typeof value !== "number" || !Number.isFinite(value) || value <= 0) {
    throw new SpecError(`${label} must be a positive number`);
  }
  return value;
}
