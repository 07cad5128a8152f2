/**
 * Parser for lowertail report files.
 *
 * Format: a `# lowertail-report v<N>` magic line, `# key: value` header
 * lines (config entries use `# config: key=value`), then `[section]` blocks
 * of plain CSV. Readers must refuse versions newer than they understand.
 */

export const SUPPORTED_VERSION = 1;

export type Cell = number | string | boolean;

export interface Section {
  name: string;
  columns: string[];
  rows: Cell[][];
}

export interface Report {
  version: number;
  experiment: string;
  seed: number;
  config: Record<string, string>;
  sections: Map<string, Section>;
}

export class ReportSchemaError extends Error {}

function parseCell(raw: string): Cell {
  if (raw === "true") return true;
  if (raw === "false") return false;
  if (raw === "") return "";
  const num = Number(raw);
  if (!Number.isNaN(num) || raw === "nan" || raw === "-nan") {
    // Number("nan") is NaN but so is Number("garbage"); only accept the
    // numeric reading when the text actually looks numeric
    if (/^[+-]?(\d|\.\d|inf|nan)/.test(raw)) return raw.includes("nan") ? NaN : num;
  }
  if (raw === "inf") return Infinity;
  if (raw === "-inf") return -Infinity;
  return raw;
}

export function parseReport(text: string): Report {
  const lines = text.split(/\r?\n/);
  const magic = lines[0] ?? "";
  const m = magic.match(/^# lowertail-report v(\d+)$/);
  if (!m) {
    throw new ReportSchemaError(`not a lowertail report: first line ${JSON.stringify(magic)}`);
  }
  const version = parseInt(m[1], 10);
  if (version > SUPPORTED_VERSION) {
    throw new ReportSchemaError(
      `report version ${version} is newer than supported version ${SUPPORTED_VERSION}`,
    );
  }
  let experiment = "";
  let seed = 0;
  const config: Record<string, string> = {};
  const sections = new Map<string, Section>();
  let current: Section | null = null;

  for (const line of lines.slice(1)) {
    if (line === "") continue;
    if (line.startsWith("# ")) {
      const body = line.slice(2);
      if (body.startsWith("config: ")) {
        const kv = body.slice("config: ".length);
        const eq = kv.indexOf("=");
        if (eq < 0) throw new ReportSchemaError(`malformed config line: ${line}`);
        config[kv.slice(0, eq)] = kv.slice(eq + 1);
      } else if (body.startsWith("experiment: ")) {
        experiment = body.slice("experiment: ".length);
      } else if (body.startsWith("seed: ")) {
        seed = parseInt(body.slice("seed: ".length), 10);
      }
      continue;
    }
    const sec = line.match(/^\[(.+)\]$/);
    if (sec) {
      current = { name: sec[1], columns: [], rows: [] };
      sections.set(sec[1], current);
      continue;
    }
    if (!current) throw new ReportSchemaError(`data before any [section]: ${line}`);
    const cells = line.split(",");
    if (current.columns.length === 0) {
      current.columns = cells;
    } else {
      if (cells.length !== current.columns.length) {
        throw new ReportSchemaError(
          `row width ${cells.length} != header width ${current.columns.length} ` +
          `in section [${current.name}]`,
        );
      }
      current.rows.push(cells.map(parseCell));
    }
  }
  return { version, experiment, seed, config, sections };
}

export function section(report: Report, name: string): Section {
  const s = report.sections.get(name);
  if (!s) throw new ReportSchemaError(`missing section [${name}]`);
  return s;
}

export function column(sec: Section, name: string): Cell[] {
  const idx = sec.columns.indexOf(name);
  if (idx < 0) {
    throw new ReportSchemaError(`missing column "${name}" in section [${sec.name}]`);
  }
  return sec.rows.map((r) => r[idx]);
}

export function numberColumn(sec: Section, name: string): number[] {
  return column(sec, name).map((v, i) => {
    if (typeof v !== "number") {
      throw new ReportSchemaError(
        `column "${name}" in section [${sec.name}] has non-numeric cell in row ${i}: ${v}`,
      );
    }
    return v;
  });
}

/** The 12-hex config hash embedded in `<experiment>-<hash>.report.csv`. */
export function configHashFromPath(path: string): string {
  const base = path.split("/").pop() ?? path;
  const m = base.match(/-([0-9a-f]{12})\.report\.csv$/);
  return m ? m[1] : "unknown";
}
