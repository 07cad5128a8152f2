import { readFileSync, readdirSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import {
  ReportSchemaError,
  column,
  configHashFromPath,
  numberColumn,
  parseReport,
  section,
} from "../src/report.js";

const FIXTURES = join(__dirname, "fixtures");

function fixture(prefix: string): string {
  const name = readdirSync(FIXTURES).find(
    (f) => f.startsWith(prefix) && f.endsWith(".report.csv"),
  );
  if (!name) throw new Error(`no ${prefix} fixture`);
  return join(FIXTURES, name);
}

describe("parseReport", () => {
  it("reads header, config, and sections of a typicality report", () => {
    const rep = parseReport(readFileSync(fixture("typicality-"), "utf8"));
    expect(rep.version).toBe(1);
    expect(rep.experiment).toBe("typicality");
    expect(rep.config["eta"]).toBe("0.5");
    const pred = section(rep, "prediction");
    expect(pred.columns).toContain("predicted_mean");
    expect(numberColumn(pred, "predicted_mean")[0]).toBeCloseTo(0.1523905, 6);
    // booleans and special floats survive
    expect(column(pred, "proven_regime")[0]).toBe(true);
    expect(numberColumn(section(rep, "estimate"), "ess")[0]).toBe(Infinity);
  });

  it("floats round-trip exactly through Number()", () => {
    const rep = parseReport(readFileSync(fixture("stability-"), "utf8"));
    const slope = numberColumn(section(rep, "fit"), "slope")[0];
    expect(String(slope)).toBe("0.543427006057653");
  });

  it("refuses a newer version", () => {
    const text = readFileSync(fixture("threshold-"), "utf8").replace(
      "# lowertail-report v1",
      "# lowertail-report v2",
    );
    expect(() => parseReport(text)).toThrow(/version 2 is newer/);
  });

  it("rejects files without the magic line", () => {
    expect(() => parseReport("r,eta\n2,0.37\n")).toThrow(ReportSchemaError);
  });

  it("names the missing column and section", () => {
    const rep = parseReport(readFileSync(fixture("stability-"), "utf8"));
    expect(() => column(section(rep, "rows"), "no_such")).toThrow(
      /missing column "no_such" in section \[rows\]/,
    );
    expect(() => section(rep, "nope")).toThrow(/missing section \[nope\]/);
  });

  it("extracts the config hash from the filename", () => {
    expect(configHashFromPath("/x/y/stability-52407371638c.report.csv")).toBe(
      "52407371638c",
    );
    expect(configHashFromPath("odd-name.csv")).toBe("unknown");
  });
});
