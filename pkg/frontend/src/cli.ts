#!/usr/bin/env node
/**
 * Usage: lowertail-plots <kind> <report.csv> [more reports...] [--out DIR]
 *
 * kind: typicality | stability | threshold | cutnorm
 * Writes `<report basename>.<kind>.svg` next to each report (or into --out).
 * Exits 1 with the offending column named on any schema mismatch.
 */

import { readFileSync, writeFileSync, mkdirSync } from "node:fs";
import { basename, join } from "node:path";

import { FigureKind, render } from "./figures.js";
import { ReportSchemaError, configHashFromPath, parseReport } from "./report.js";

const KINDS = new Set(["typicality", "stability", "threshold", "cutnorm"]);

export function main(argv: string[]): number {
  const args = [...argv];
  let outDir: string | null = null;
  const outIdx = args.indexOf("--out");
  if (outIdx >= 0) {
    outDir = args[outIdx + 1] ?? null;
    if (!outDir) {
      console.error("error: --out needs a directory");
      return 1;
    }
    args.splice(outIdx, 2);
  }
  const [kind, ...paths] = args;
  if (!kind || !KINDS.has(kind) || paths.length === 0) {
    console.error(
      "usage: lowertail-plots <typicality|stability|threshold|cutnorm> <report.csv>... [--out DIR]",
    );
    return 1;
  }
  for (const path of paths) {
    let svg: string;
    try {
      const report = parseReport(readFileSync(path, "utf8"));
      svg = render(kind as FigureKind, report, configHashFromPath(path));
    } catch (err) {
      if (err instanceof ReportSchemaError) {
        console.error(`error: schema: ${path}: ${err.message}`);
        return 1;
      }
      throw err;
    }
    const name = basename(path).replace(/\.report\.csv$/, "") + `.${kind}.svg`;
    const target = outDir ? join(outDir, name) : join(path, "..", name);
    if (outDir) mkdirSync(outDir, { recursive: true });
    writeFileSync(target, svg);
    console.log(`wrote ${target}`);
  }
  return 0;
}

if (process.argv[1] && import.meta.url.endsWith(basename(process.argv[1]))) {
  process.exit(main(process.argv.slice(2)));
}
