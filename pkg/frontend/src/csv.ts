/**
 * Reader for the simulator's sweep CSV.
 *
 * The plotter draws exactly what the simulator measured — BER and its
 * half-width come straight out of the file, nothing is recomputed here.
 * That only works if the file really is a sweep CSV, so the header must
 * match the contract column-for-column (names *and* order); anything
 * else is rejected with a diagnostic naming the offending columns.
 */

// ---------------------------------------------------------------------------
// Contract
// ---------------------------------------------------------------------------

/** Exact header row the simulator writes, in order. */
export const SWEEP_HEADER = [
  "gamma0_db",
  "combiner",
  "mode",
  "ber",
  "ci95",
  "bits",
  "errors",
] as const;

/** One measured point of one curve. */
export interface SweepRow {
  gamma0Db: number;
  combiner: string;
  mode: string;
  ber: number;
  ci95: number;
  bits: number;
  errors: number;
}

/** All points sharing one (combiner, mode) pair, in ascending SNR order. */
export interface Curve {
  combiner: string;
  mode: string;
  /** Legend text: "combiner/mode". */
  label: string;
  points: SweepRow[];
}

/** Any violation of the sweep CSV contract; message says which column/line. */
export class CsvContractError extends Error {}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

function checkHeader(cells: string[]): void {
  const want = SWEEP_HEADER as readonly string[];
  if (cells.length === want.length && cells.every((c, i) => c === want[i])) {
    return;
  }
  const missing = want.filter((c) => !cells.includes(c));
  const extra = cells.filter((c) => !want.includes(c));
  const parts: string[] = [];
  if (missing.length > 0) parts.push(`missing column(s): ${missing.join(", ")}`);
  if (extra.length > 0) parts.push(`unexpected column(s): ${extra.join(", ")}`);
  if (parts.length === 0) parts.push(`columns out of order: got ${cells.join(",")}`);
  throw new CsvContractError(
    `bad sweep header (${parts.join("; ")}); expected "${want.join(",")}"`
  );
}

function numField(raw: string, name: string, line: number): number {
  const v = Number(raw);
  if (raw.trim() === "" || !Number.isFinite(v)) {
    throw new CsvContractError(`line ${line}: ${name} is not a finite number: "${raw}"`);
  }
  return v;
}

function countField(raw: string, name: string, line: number): number {
  const v = numField(raw, name, line);
  if (!Number.isInteger(v) || v < 0) {
    throw new CsvContractError(`line ${line}: ${name} must be a non-negative integer: "${raw}"`);
  }
  return v;
}

/**
 * Parse sweep CSV text into rows.
 *
 * Accepts LF or CRLF; blank lines are ignored. A measured BER of 0
 * (error-free at the simulated sample size) is valid data — the chart
 * layer decides how to place it on a log axis.
 */
export function parseSweepCsv(text: string): SweepRow[] {
  const lines = text
    .split(/\r?\n/)
    .map((l, i) => ({ raw: l, line: i + 1 }))
    .filter((l) => l.raw.trim() !== "");
  if (lines.length === 0) {
    throw new CsvContractError(`empty CSV; expected header "${SWEEP_HEADER.join(",")}"`);
  }

  const head = lines[0]!;
  checkHeader(head.raw.split(",").map((c) => c.trim()));
  if (lines.length === 1) {
    throw new CsvContractError("CSV has a header but no data rows");
  }

  const rows: SweepRow[] = [];
  for (const { raw, line } of lines.slice(1)) {
    const cells = raw.split(",").map((c) => c.trim());
    if (cells.length !== SWEEP_HEADER.length) {
      throw new CsvContractError(
        `line ${line}: expected ${SWEEP_HEADER.length} fields, got ${cells.length}`
      );
    }
    const row: SweepRow = {
      gamma0Db: numField(cells[0]!, "gamma0_db", line),
      combiner: cells[1]!,
      mode: cells[2]!,
      ber: numField(cells[3]!, "ber", line),
      ci95: numField(cells[4]!, "ci95", line),
      bits: countField(cells[5]!, "bits", line),
      errors: countField(cells[6]!, "errors", line),
    };
    if (row.combiner === "" || row.mode === "") {
      throw new CsvContractError(`line ${line}: combiner/mode must be non-empty`);
    }
    if (row.ber < 0 || row.ber > 1) {
      throw new CsvContractError(`line ${line}: ber out of [0, 1]: ${row.ber}`);
    }
    if (row.ci95 < 0) {
      throw new CsvContractError(`line ${line}: ci95 must be >= 0: ${row.ci95}`);
    }
    rows.push(row);
  }
  return rows;
}

/**
 * Group rows into curves, one per distinct (combiner, mode) pair.
 *
 * Curve order follows first appearance in the file (stable legends across
 * re-renders of the same sweep); points within a curve are sorted by SNR.
 */
export function groupCurves(rows: SweepRow[]): Curve[] {
  const byKey = new Map<string, Curve>();
  for (const row of rows) {
    const label = `${row.combiner}/${row.mode}`;
    let curve = byKey.get(label);
    if (curve === undefined) {
      curve = { combiner: row.combiner, mode: row.mode, label, points: [] };
      byKey.set(label, curve);
    }
    curve.points.push(row);
  }
  const curves = [...byKey.values()];
  for (const c of curves) {
    c.points.sort((a, b) => a.gamma0Db - b.gamma0Db);
  }
  return curves;
}
