import { mkdtempSync, readFileSync, readdirSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { render } from "../src/figures.js";
import { main } from "../src/cli.js";
import { numberColumn, parseReport, section } from "../src/report.js";

const FIXTURES = join(__dirname, "fixtures");

function fixturePath(prefix: string): string {
  const name = readdirSync(FIXTURES).find(
    (f) => f.startsWith(prefix) && f.endsWith(".report.csv"),
  );
  if (!name) throw new Error(`no ${prefix} fixture`);
  return join(FIXTURES, name);
}

function load(prefix: string) {
  return parseReport(readFileSync(fixturePath(prefix), "utf8"));
}

describe("figure rendering", () => {
  it("typicality: the prediction line annotation is the report value verbatim", () => {
    const rep = load("typicality-");
    const predicted = numberColumn(section(rep, "prediction"), "predicted_mean")[0];
    const svg = render("typicality", rep, "cde629a9bc72");
    expect(svg).toContain(`prediction = ${String(predicted)}`);
    expect(svg).toContain("cde629a9bc72");
    // deterministic output
    expect(render("typicality", rep, "cde629a9bc72")).toBe(svg);
  });

  it("stability: the annotated slope is the report column verbatim", () => {
    const rep = load("stability-");
    const slope = numberColumn(section(rep, "fit"), "slope")[0];
    const svg = render("stability", rep, "52407371638c");
    expect(svg).toContain(`fitted slope = ${String(slope)}`);
    expect(svg).toContain("guide slope = 1/12");
  });

  it("threshold and cutnorm render without loss of their headline numbers", () => {
    const thr = load("threshold-");
    const svgT = render("threshold", thr, "x");
    for (const eta of numberColumn(section(thr, "threshold"), "eta_threshold")) {
      expect(svgT).toContain(String(eta).slice(0, 8));
    }
    const cut = load("cutnorm-");
    const med = numberColumn(section(cut, "distribution"), "median_over_p")[0];
    expect(render("cutnorm", cut, "x")).toContain(`median = ${String(med)}`);
  });

  it("fails loudly on a schema-mangled report, naming the column", () => {
    const text = readFileSync(fixturePath("stability-"), "utf8").replace(
      "excess,max_cut_distance,mean_cut_distance,max_small_edge_fraction",
      "excess,cut_distance,mean_cut_distance,max_small_edge_fraction",
    );
    expect(() => render("stability", parseReport(text), "x")).toThrow(
      /missing column "max_cut_distance" in section \[rows\]/,
    );
  });

  it("refuses a report of the wrong kind", () => {
    expect(() => render("typicality", load("stability-"), "x")).toThrow(
      /needs a typicality report/,
    );
  });
});

describe("cli", () => {
  it("renders a figure file named after the report", () => {
    const out = mkdtempSync(join(tmpdir(), "plots-"));
    const code = main(["stability", fixturePath("stability-"), "--out", out]);
    expect(code).toBe(0);
    const files = readdirSync(out);
    expect(files).toEqual(["stability-52407371638c.stability.svg"]);
    const svg = readFileSync(join(out, files[0]), "utf8");
    expect(svg).toContain("fitted slope");
  });

  it("exits nonzero on a mangled report", () => {
    const out = mkdtempSync(join(tmpdir(), "plots-"));
    const bad = join(out, "stability-000000000000.report.csv");
    writeFileSync(
      bad,
      readFileSync(fixturePath("stability-"), "utf8").replace("slope,q_const", "slop,q_const"),
    );
    expect(main(["stability", bad, "--out", out])).toBe(1);
  });

  it("rejects unknown figure kinds", () => {
    expect(main(["sparkline", fixturePath("stability-")])).toBe(1);
  });
});
