/** Minimal deterministic SVG building blocks; no randomness, no dates. */

export const WIDTH = 720;
export const HEIGHT = 440;
export const MARGIN = { top: 44, right: 24, bottom: 72, left: 72 };

export interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const f = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.range = range;
  return f;
}

export function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Fixed-notation tick label; trims trailing zeros so axes stay readable. */
export function tickLabel(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return String(parseFloat(v.toPrecision(6)));
}

export function ticks(lo: number, hi: number, count: number): number[] {
  const out: number[] = [];
  for (let i = 0; i <= count; i++) out.push(lo + ((hi - lo) * i) / count);
  return out;
}

export function xAxis(x: Scale, y0: number, label: string): string {
  const parts: string[] = [];
  parts.push(
    `<line x1="${x.range[0]}" y1="${y0}" x2="${x.range[1]}" y2="${y0}" stroke="#333"/>`,
  );
  for (const t of ticks(x.domain[0], x.domain[1], 5)) {
    const px = x(t);
    parts.push(`<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 5}" stroke="#333"/>`);
    parts.push(
      `<text x="${px}" y="${y0 + 20}" text-anchor="middle" font-size="11">${esc(tickLabel(t))}</text>`,
    );
  }
  const mid = (x.range[0] + x.range[1]) / 2;
  parts.push(
    `<text x="${mid}" y="${y0 + 44}" text-anchor="middle" font-size="13">${esc(label)}</text>`,
  );
  return parts.join("\n");
}

export function yAxis(y: Scale, x0: number, label: string): string {
  const parts: string[] = [];
  parts.push(
    `<line x1="${x0}" y1="${y.range[0]}" x2="${x0}" y2="${y.range[1]}" stroke="#333"/>`,
  );
  for (const t of ticks(y.domain[0], y.domain[1], 5)) {
    const py = y(t);
    parts.push(`<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" stroke="#333"/>`);
    parts.push(
      `<text x="${x0 - 8}" y="${py + 4}" text-anchor="end" font-size="11">${esc(tickLabel(t))}</text>`,
    );
  }
  const midY = (y.range[0] + y.range[1]) / 2;
  parts.push(
    `<text x="${x0 - 52}" y="${midY}" text-anchor="middle" font-size="13" ` +
    `transform="rotate(-90 ${x0 - 52} ${midY})">${esc(label)}</text>`,
  );
  return parts.join("\n");
}

export function document(title: string, caption: string, body: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="15">${esc(title)}</text>`,
    body,
    `<text x="${WIDTH / 2}" y="${HEIGHT - 8}" text-anchor="middle" font-size="10" ` +
    `fill="#666">${esc(caption)}</text>`,
    `</svg>`,
    ``,
  ].join("\n");
}
