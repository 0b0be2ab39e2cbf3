/**
 * CLI: render one figure from a JSON spec.
 *
 *   node dist/main.js --spec figure.json
 *
 * Exit codes: 0 success, 2 bad spec, 3 unreadable or schema-violating
 * input data.
 */

import { pathToFileURL } from "node:url";

import { SchemaError } from "./csv.js";
import { renderSpec } from "./render.js";
import { SpecError, loadSpec } from "./spec.js";

export function main(argv: string[]): number {
  const specIdx = argv.indexOf("--spec");
  if (specIdx < 0 || specIdx + 1 >= argv.length) {
    process.stderr.write("usage: main --spec <figure.json>\n");
    return 2;
  }
  try {
    const spec = loadSpec(argv[specIdx + 1]!);
    renderSpec(spec);
    process.stdout.write(`wrote ${spec.output}\n`);
    return 0;
  } catch (err) {
    if (err instanceof SpecError) {
      process.stderr.write(`spec error: ${err.message}\n`);
      return 2;
    }
    if (err instanceof SchemaError) {
      process.stderr.write(`data error: ${err.message}\n`);
      return 3;
    }
    throw err;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
