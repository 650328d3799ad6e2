/**
 * BER-vs-SNR figure builder: curves on a log₁₀ BER axis, rendered as a
 * self-contained SVG string (no canvas or font dependencies).
 *
 * Each curve carries 95% confidence whiskers taken verbatim from the CSV.
 * Points with ber = 0 (error-free at the simulated sample size) have no
 * position on a log axis, so they are dropped from the drawn polyline;
 * the curve itself stays in the legend.
 */

import type { Curve, SweepRow } from "./csv.js";

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

export interface ChartOpts {
  title?: string;
}

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

const PALETTE = [
  "#4361ee", // blue
  "#e63946", // red
  "#2d6a4f", // green
  "#f77f00", // orange
  "#9d4edd", // purple
  "#0096c7", // teal
  "#bc6c25", // brown
  "#555555", // grey
];

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function niceTicks(min: number, max: number, count: number): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const nice = [1, 2, 5, 10].map((m) => m * mag);
  const step = nice.find((n) => n >= rough) ?? rough;
  const start = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= max + step * 0.01; v += step) ticks.push(v);
  return ticks;
}

/** "1e-3"-style decade label; exponent 0 renders as "1". */
function decadeLabel(exp: number): string {
  return exp === 0 ? "1" : `1e${exp}`;
}

// ---------------------------------------------------------------------------
// Axis domains
// ---------------------------------------------------------------------------

/**
 * Decade range [eMin, eMax] covering every positive BER and whisker end.
 * Lower whisker ends that cross zero cannot widen the domain (they clamp
 * to the axis floor when drawn). Falls back to [-6, 0] when nothing is
 * positive so an all-zero sweep still renders a frame.
 */
function decadeRange(curves: Curve[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const c of curves) {
    for (const p of c.points) {
      if (p.ber <= 0) continue;
      hi = Math.max(hi, p.ber + p.ci95);
      lo = Math.min(lo, p.ber - p.ci95 > 0 ? p.ber - p.ci95 : p.ber);
    }
  }
  if (!Number.isFinite(lo)) return [-6, 0];
  let eMin = Math.floor(Math.log10(lo));
  let eMax = Math.ceil(Math.log10(hi));
  if (eMax <= eMin) eMax = eMin + 1;
  return [eMin, eMax];
}

function gammaRange(curves: Curve[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const c of curves) {
    for (const p of c.points) {
      lo = Math.min(lo, p.gamma0Db);
      hi = Math.max(hi, p.gamma0Db);
    }
  }
  if (!Number.isFinite(lo)) return [0, 1];
  return [lo, hi];
}

// ---------------------------------------------------------------------------
// Chart builder
// ---------------------------------------------------------------------------

/** Render grouped curves to an SVG document string. Pure and deterministic. */
export function buildBerChart(curves: Curve[], opts: ChartOpts = {}): string {
  const W = 640;
  const H = 420;
  const ml = 64;
  const mr = 18;
  const mt = 40;
  const mb = 46;
  const pw = W - ml - mr;
  const ph = H - mt - mb;

  const [gLo, gHi] = gammaRange(curves);
  const [eMin, eMax] = decadeRange(curves);
  const xOf = (g: number) => ml + ((g - gLo) / (gHi - gLo || 1)) * pw;
  const yOf = (ber: number) =>
    mt + ((eMax - Math.log10(ber)) / (eMax - eMin)) * ph;
  const yFloor = Math.pow(10, eMin);

  const nPoints = curves.reduce((n, c) => n + c.points.length, 0);
  const title = opts.title ?? "Coded BER vs source-destination SNR";

  let s = `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif" data-y-scale="log10">\n`;
  s += `<rect width="${W}" height="${H}" fill="#fff"/>\n`;

  // Title + subtitle
  s += `<text x="${ml}" y="${mt - 22}" font-size="13" font-weight="600" fill="#222">${esc(title)}</text>\n`;
  s += `<text x="${ml}" y="${mt - 8}" font-size="9" fill="#888">${curves.length} curve(s), ${nPoints} point(s)</text>\n`;

  // Decade gridlines + y tick labels
  for (let e = eMin; e <= eMax; e++) {
    const y = yOf(Math.pow(10, e));
    s += `<line x1="${ml}" y1="${y.toFixed(1)}" x2="${ml + pw}" y2="${y.toFixed(1)}" stroke="#eee" stroke-width="0.6"/>\n`;
    s += `<line x1="${ml - 3}" y1="${y.toFixed(1)}" x2="${ml}" y2="${y.toFixed(1)}" stroke="#333" stroke-width="0.5"/>\n`;
    s += `<text x="${ml - 6}" y="${(y + 3).toFixed(1)}" text-anchor="end" font-size="9" fill="#444">${decadeLabel(e)}</text>\n`;
  }

  // X gridlines + tick labels (integer dB values)
  for (const g of niceTicks(gLo, gHi, 8)) {
    const x = xOf(g);
    s += `<line x1="${x.toFixed(1)}" y1="${mt}" x2="${x.toFixed(1)}" y2="${mt + ph}" stroke="#f4f4f4" stroke-width="0.6"/>\n`;
    s += `<line x1="${x.toFixed(1)}" y1="${mt + ph}" x2="${x.toFixed(1)}" y2="${mt + ph + 3}" stroke="#333" stroke-width="0.5"/>\n`;
    const label = g % 1 === 0 ? String(g) : g.toFixed(1);
    s += `<text x="${x.toFixed(1)}" y="${mt + ph + 14}" text-anchor="middle" font-size="9" fill="#444">${label}</text>\n`;
  }

  // Curves: whiskers under markers, markers under nothing; one <g> per curve
  curves.forEach((curve, ci) => {
    const color = PALETTE[ci % PALETTE.length]!;
    s += `<g class="curve" data-label="${esc(curve.label)}">\n`;

    const drawn = curve.points.filter((p) => p.ber > 0);
    for (const p of drawn) {
      if (p.ci95 <= 0) continue;
      const x = xOf(p.gamma0Db).toFixed(1);
      const yHi = yOf(p.ber + p.ci95).toFixed(1);
      const yLo = yOf(Math.max(p.ber - p.ci95, yFloor)).toFixed(1);
      s += `<line class="whisker" x1="${x}" y1="${yHi}" x2="${x}" y2="${yLo}" stroke="${color}" stroke-width="0.8" opacity="0.7"/>\n`;
      s += `<line x1="${Number(x) - 2.5}" y1="${yHi}" x2="${Number(x) + 2.5}" y2="${yHi}" stroke="${color}" stroke-width="0.8" opacity="0.7"/>\n`;
      s += `<line x1="${Number(x) - 2.5}" y1="${yLo}" x2="${Number(x) + 2.5}" y2="${yLo}" stroke="${color}" stroke-width="0.8" opacity="0.7"/>\n`;
    }

    const pts = drawn
      .map((p) => `${xOf(p.gamma0Db).toFixed(1)},${yOf(p.ber).toFixed(1)}`)
      .join(" ");
    s += `<polyline fill="none" stroke="${color}" stroke-width="1.4" points="${pts}"/>\n`;
    for (const p of drawn) {
      s += `<circle cx="${xOf(p.gamma0Db).toFixed(1)}" cy="${yOf(p.ber).toFixed(1)}" r="2.4" fill="${color}"/>\n`;
    }
    s += `</g>\n`;
  });

  // Axes frame
  s += `<line x1="${ml}" y1="${mt}" x2="${ml}" y2="${mt + ph}" stroke="#333" stroke-width="0.8"/>\n`;
  s += `<line x1="${ml}" y1="${mt + ph}" x2="${ml + pw}" y2="${mt + ph}" stroke="#333" stroke-width="0.8"/>\n`;
  s += `<text x="${ml + pw / 2}" y="${H - 8}" text-anchor="middle" font-size="10" fill="#444">γ₀ (dB)</text>\n`;
  s += `<text x="16" y="${mt + ph / 2}" text-anchor="middle" font-size="10" fill="#444" transform="rotate(-90,16,${mt + ph / 2})">BER</text>\n`;

  // Legend (top right, inside the plot area)
  const legendW = Math.max(8, ...curves.map((c) => c.label.length)) * 5.4 + 30;
  const legendH = curves.length * 13 + 6;
  const lx = ml + pw - legendW - 6;
  const ly = mt + 6;
  s += `<rect x="${lx}" y="${ly}" width="${legendW}" height="${legendH}" rx="2" fill="white" fill-opacity="0.85" stroke="#ddd" stroke-width="0.5"/>\n`;
  curves.forEach((curve, ci) => {
    const color = PALETTE[ci % PALETTE.length]!;
    const yy = ly + 10 + ci * 13;
    s += `<line x1="${lx + 6}" y1="${yy}" x2="${lx + 22}" y2="${yy}" stroke="${color}" stroke-width="1.4"/>\n`;
    s += `<circle cx="${lx + 14}" cy="${yy}" r="2.4" fill="${color}"/>\n`;
    s += `<text class="legend-label" x="${lx + 27}" y="${yy + 3}" font-size="9" fill="#333">${esc(curve.label)}</text>\n`;
  });

  s += `</svg>\n`;
  return s;
}
