/**
 * Spec-driven rendering: dispatch on figure kind, write the SVG.
 * Inputs are read-only; rendering the same spec twice overwrites the
 * output with identical bytes.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { renderErrorCurve } from "./figures/errorCurve.js";
import { renderPosteriorHist } from "./figures/posteriorHist.js";
import { renderPosteriorTrace } from "./figures/posteriorTrace.js";
import { renderSimplexScatter } from "./figures/simplexScatter.js";
import type { FigureSpec } from "./spec.js";

const RENDERERS: Record<FigureSpec["kind"], (input: string, options: FigureSpec["options"]) => string> = {
  "simplex-scatter": renderSimplexScatter,
  "posterior-hist": renderPosteriorHist,
  "error-curve": renderErrorCurve,
  "posterior-trace": renderPosteriorTrace,
};

export function renderSpec(spec: FigureSpec): string {
  const svg = RENDERERS[spec.kind](spec.input, spec.options);
  fs.mkdirSync(path.dirname(spec.output), { recursive: true });
  fs.writeFileSync(spec.output, svg);
  return svg;
}
