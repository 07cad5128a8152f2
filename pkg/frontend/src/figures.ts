/**
 * Figure renderers. Each one is a pure function from a parsed report to an
 * SVG string: every plotted number comes out of the report, the only
 * computation done here is display regression / binning.
 */

import {
  Report,
  ReportSchemaError,
  numberColumn,
  section,
} from "./report.js";
import {
  HEIGHT,
  MARGIN,
  WIDTH,
  document,
  esc,
  linearScale,
  xAxis,
  yAxis,
} from "./svg.js";

export type FigureKind = "typicality" | "stability" | "threshold" | "cutnorm";

const PLOT_X: [number, number] = [MARGIN.left, WIDTH - MARGIN.right];
const PLOT_Y: [number, number] = [HEIGHT - MARGIN.bottom, MARGIN.top];

function requireExperiment(report: Report, expected: string): void {
  if (report.experiment !== expected) {
    throw new ReportSchemaError(
      `figure kind "${expected}" needs a ${expected} report, got "${report.experiment}"`,
    );
  }
}

export function renderTypicality(report: Report, configHash: string): string {
  requireExperiment(report, "typicality");
  const hist = section(report, "histogram");
  const left = numberColumn(hist, "bin_left");
  const right = numberColumn(hist, "bin_right");
  const mass = numberColumn(hist, "mass");
  const pred = section(report, "prediction");
  const predicted = numberColumn(pred, "predicted_mean")[0];

  const xHi = Math.max(right[right.length - 1] ?? 1, predicted * 1.05);
  const x = linearScale([Math.min(left[0] ?? 0, 0), xHi], PLOT_X);
  const y = linearScale([0, Math.max(...mass, 1e-12)], PLOT_Y);

  const bars = mass
    .map((m, i) => {
      const x0 = x(left[i]);
      const w = Math.max(x(right[i]) - x0, 0.5);
      return `<rect x="${x0}" y="${y(m)}" width="${w}" height="${y(0) - y(m)}" ` +
        `fill="#7aa6c2" stroke="white" stroke-width="0.5"/>`;
    })
    .join("\n");
  const px = x(predicted);
  const line =
    `<line x1="${px}" y1="${PLOT_Y[0]}" x2="${px}" y2="${PLOT_Y[1]}" ` +
    `stroke="#c0392b" stroke-width="1.5" stroke-dasharray="6 3"/>\n` +
    `<text x="${px + 6}" y="${PLOT_Y[1] + 14}" font-size="11" fill="#c0392b">` +
    `prediction = ${esc(String(predicted))}</text>`;

  const body = [
    bars,
    line,
    xAxis(x, PLOT_Y[0], `conditioned copy count of H=${report.config["H"] ?? "?"}`),
    yAxis(y, PLOT_X[0], "probability mass"),
  ].join("\n");
  const cfg = `n=${report.config["n"]} p=${report.config["p"]} eta=${report.config["eta"]}`;
  return document(
    `Conditioned count vs constant prediction (${cfg})`,
    `typicality report, config ${configHash}`,
    body,
  );
}

export function renderStability(report: Report, configHash: string): string {
  requireExperiment(report, "stability");
  const rows = section(report, "rows");
  const excess = numberColumn(rows, "excess");
  const maxCut = numberColumn(rows, "max_cut_distance");
  const meanCut = numberColumn(rows, "mean_cut_distance");
  const fit = section(report, "fit");
  const slope = numberColumn(fit, "slope")[0];

  const pts = excess
    .map((e, i) => [e, maxCut[i], meanCut[i]])
    .filter(([e, m]) => e > 0 && m > 0);
  if (pts.length < 2) throw new ReportSchemaError("stability report has fewer than 2 usable rows");
  const lx = pts.map(([e]) => Math.log10(e));
  const lyMax = pts.map(([, m]) => Math.log10(m));

  const x = linearScale([Math.min(...lx) - 0.3, Math.max(...lx) + 0.3], PLOT_X);
  const allY = lyMax.concat(pts.filter((p) => p[2] > 0).map((p) => Math.log10(p[2])));
  const y = linearScale([Math.min(...allY) - 0.3, Math.max(...allY) + 0.3], PLOT_Y);

  // display regression through (log excess, log max cut distance)
  const n = lx.length;
  const mx = lx.reduce((a, b) => a + b, 0) / n;
  const my = lyMax.reduce((a, b) => a + b, 0) / n;
  const beta =
    lx.reduce((a, v, i) => a + (v - mx) * (lyMax[i] - my), 0) /
    lx.reduce((a, v) => a + (v - mx) * (v - mx), 0);

  const marks = pts
    .map(([e, m, mn], i) => {
      const cx = x(lx[i]);
      const circles = [`<circle cx="${cx}" cy="${y(Math.log10(m))}" r="4" fill="#2c3e50"/>`];
      if (mn > 0) circles.push(`<circle cx="${cx}" cy="${y(Math.log10(mn))}" r="3" fill="#95a5a6"/>`);
      return circles.join("\n");
    })
    .join("\n");
  const fitLine =
    `<line x1="${x(lx[0])}" y1="${y(my + beta * (lx[0] - mx))}" ` +
    `x2="${x(lx[n - 1])}" y2="${y(my + beta * (lx[n - 1] - mx))}" ` +
    `stroke="#c0392b" stroke-width="1.5"/>`;
  // 1/12-power guide anchored at the last point
  const g0 = lyMax[n - 1] - (1 / 12) * lx[n - 1];
  const guide =
    `<line x1="${x(lx[0])}" y1="${y(g0 + lx[0] / 12)}" ` +
    `x2="${x(lx[n - 1])}" y2="${y(g0 + lx[n - 1] / 12)}" ` +
    `stroke="#27ae60" stroke-width="1" stroke-dasharray="4 3"/>`;
  const note =
    `<text x="${PLOT_X[0] + 10}" y="${PLOT_Y[1] + 14}" font-size="11" fill="#c0392b">` +
    `fitted slope = ${esc(String(slope))}</text>\n` +
    `<text x="${PLOT_X[0] + 10}" y="${PLOT_Y[1] + 30}" font-size="11" fill="#27ae60">` +
    `guide slope = 1/12</text>`;

  const body = [
    marks,
    fitLine,
    guide,
    note,
    xAxis(x, PLOT_Y[0], "log10 entropy excess (per slot)"),
    yAxis(y, PLOT_X[0], "log10 cut distance"),
  ].join("\n");
  const cfg = `n=${report.config["n"]} eta=${report.config["eta"]}`;
  return document(
    `Near-minimizer stability probe (${cfg})`,
    `stability report, config ${configHash}`,
    body,
  );
}

export function renderThreshold(report: Report, configHash: string): string {
  requireExperiment(report, "threshold");
  const sec = section(report, "threshold");
  const rs = numberColumn(sec, "r");
  const etas = numberColumn(sec, "eta_threshold");
  if (rs.length === 0) throw new ReportSchemaError("threshold report has no rows");

  const x = linearScale([Math.min(...rs) - 0.5, Math.max(...rs) + 0.5], PLOT_X);
  const y = linearScale([0, Math.max(...etas) * 1.15], PLOT_Y);
  const path = rs.map((r, i) => `${x(r)},${y(etas[i])}`).join(" ");
  const body = [
    `<polyline points="${path}" fill="none" stroke="#2c3e50" stroke-width="1.5"/>`,
    rs
      .map(
        (r, i) =>
          `<circle cx="${x(r)}" cy="${y(etas[i])}" r="4" fill="#2c3e50"/>\n` +
          `<text x="${x(r)}" y="${y(etas[i]) - 10}" text-anchor="middle" font-size="10">` +
          `${esc(String(etas[i]).slice(0, 8))}</text>`,
      )
      .join("\n"),
    xAxis(x, PLOT_Y[0], "edge count e(H)"),
    yAxis(y, PLOT_X[0], "constancy threshold"),
  ].join("\n");
  return document(
    "Constancy threshold by edge count",
    `threshold report, config ${configHash}`,
    body,
  );
}

export function renderCutnorm(report: Report, configHash: string): string {
  requireExperiment(report, "cutnorm");
  const samples = section(report, "samples");
  const upper = numberColumn(samples, "cutnorm_over_p_upper");
  const dist = section(report, "distribution");
  const median = numberColumn(dist, "median_over_p")[0];
  if (upper.length === 0) throw new ReportSchemaError("cutnorm report has no samples");

  // display binning only; the summary statistics stay those of the report
  const lo = Math.min(...upper, 0);
  const hi = Math.max(...upper) * 1.05 || 1;
  const bins = 24;
  const counts = new Array<number>(bins).fill(0);
  for (const v of upper) {
    const b = Math.min(bins - 1, Math.floor(((v - lo) / (hi - lo)) * bins));
    counts[b] += 1;
  }
  const x = linearScale([lo, hi], PLOT_X);
  const y = linearScale([0, Math.max(...counts)], PLOT_Y);
  const w = (PLOT_X[1] - PLOT_X[0]) / bins;
  const bars = counts
    .map(
      (c, i) =>
        `<rect x="${PLOT_X[0] + i * w}" y="${y(c)}" width="${w}" ` +
        `height="${y(0) - y(c)}" fill="#7aa6c2" stroke="white" stroke-width="0.5"/>`,
    )
    .join("\n");
  const mx = x(median);
  const line =
    `<line x1="${mx}" y1="${PLOT_Y[0]}" x2="${mx}" y2="${PLOT_Y[1]}" ` +
    `stroke="#c0392b" stroke-width="1.5" stroke-dasharray="6 3"/>\n` +
    `<text x="${mx + 6}" y="${PLOT_Y[1] + 14}" font-size="11" fill="#c0392b">` +
    `median = ${esc(String(median))}</text>`;
  const body = [
    bars,
    line,
    xAxis(x, PLOT_Y[0], "cut distance to constant, over p"),
    yAxis(y, PLOT_X[0], "samples"),
  ].join("\n");
  const cfg = `n=${report.config["n"]} p=${report.config["p"]} eta=${report.config["eta"]}`;
  return document(
    `Cut-norm distribution over conditioned samples (${cfg})`,
    `cutnorm report, config ${configHash}`,
    body,
  );
}

const RENDERERS: Record<FigureKind, (r: Report, hash: string) => string> = {
  typicality: renderTypicality,
  stability: renderStability,
  threshold: renderThreshold,
  cutnorm: renderCutnorm,
};

export function render(kind: FigureKind, report: Report, configHash: string): string {
  const f = RENDERERS[kind];
  if (!f) throw new ReportSchemaError(`unknown figure kind "${kind}"`);
  return f(report, configHash);
}
