import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { CsvContractError, groupCurves, parseSweepCsv, SWEEP_HEADER } from "../src/csv.js";

const FIXTURE = fileURLToPath(new URL("./fixtures/fig1_sweep.csv", import.meta.url));
const fixtureText = () => readFileSync(FIXTURE, "utf-8");

const HEAD = SWEEP_HEADER.join(",");

describe("parseSweepCsv", () => {
  it("parses the captured sweep fixture", () => {
    const rows = parseSweepCsv(fixtureText());
    expect(rows).toHaveLength(45);
    expect(rows[0]).toEqual({
      gamma0Db: 4,
      combiner: "none",
      mode: "no-relay",
      ber: 9.9950396825e-2,
      ci95: 6.5464566375e-3,
      bits: 8064,
      errors: 806,
    });
  });

  it("accepts CRLF line endings and blank lines", () => {
    const text = `${HEAD}\r\n4,none,no-relay,0.1,0.01,1000,100\r\n\r\n`;
    expect(parseSweepCsv(text)).toHaveLength(1);
  });

  it("accepts ber = 0 (error-free point)", () => {
    const text = `${HEAD}\n20,ml,relay,0,0,24192,0\n`;
    expect(parseSweepCsv(text)[0]!.ber).toBe(0);
  });

  it("rejects an empty file", () => {
    expect(() => parseSweepCsv("")).toThrow(CsvContractError);
    expect(() => parseSweepCsv("")).toThrow(/empty CSV/);
  });

  it("rejects a header-only file", () => {
    expect(() => parseSweepCsv(`${HEAD}\n`)).toThrow(/no data rows/);
  });

  it("names a missing column", () => {
    const text = "gamma0_db,combiner,mode,ber,bits,errors\n4,none,no-relay,0.1,1000,100\n";
    expect(() => parseSweepCsv(text)).toThrow(/missing column\(s\): ci95/);
  });

  it("names an unexpected column", () => {
    const text = `${HEAD},snr\n4,none,no-relay,0.1,0.01,1000,100,3\n`;
    expect(() => parseSweepCsv(text)).toThrow(/unexpected column\(s\): snr/);
  });

  it("rejects the right columns in the wrong order", () => {
    const text = "combiner,gamma0_db,mode,ber,ci95,bits,errors\nnone,4,no-relay,0.1,0.01,1000,100\n";
    expect(() => parseSweepCsv(text)).toThrow(/out of order/);
  });

  it("reports the line of a short row", () => {
    const text = `${HEAD}\n4,none,no-relay,0.1,0.01,1000,100\n6,none,no-relay,0.05\n`;
    expect(() => parseSweepCsv(text)).toThrow(/line 3: expected 7 fields, got 4/);
  });

  it("rejects non-numeric and out-of-range values", () => {
    expect(() =>
      parseSweepCsv(`${HEAD}\n4,none,no-relay,lots,0.01,1000,100\n`)
    ).toThrow(/ber is not a finite number/);
    expect(() =>
      parseSweepCsv(`${HEAD}\n4,none,no-relay,1.5,0.01,1000,100\n`)
    ).toThrow(/ber out of \[0, 1\]/);
    expect(() =>
      parseSweepCsv(`${HEAD}\n4,none,no-relay,0.1,0.01,999.5,100\n`)
    ).toThrow(/bits must be a non-negative integer/);
  });
});

describe("groupCurves", () => {
  it("splits the fixture into 5 curves of 9 points each", () => {
    const curves = groupCurves(parseSweepCsv(fixtureText()));
    expect(curves.map((c) => c.label)).toEqual([
      "none/no-relay",
      "mrc/relay",
      "mmse/relay",
      "cmrc/relay",
      "ml/relay",
    ]);
    for (const c of curves) {
      expect(c.points).toHaveLength(9);
    }
  });

  it("produces one curve per distinct (combiner, mode) pair", () => {
    const text = [
      HEAD,
      "8,ml,relay,0.01,0.001,1000,10",
      "4,ml,relay,0.10,0.010,1000,100",
      "4,ml,mimo-1x2,0.05,0.005,1000,50",
      "4,none,no-relay,0.20,0.020,1000,200",
    ].join("\n");
    const curves = groupCurves(parseSweepCsv(text));
    expect(curves.map((c) => c.label)).toEqual(["ml/relay", "ml/mimo-1x2", "none/no-relay"]);
    // points sorted by SNR within a curve
    expect(curves[0]!.points.map((p) => p.gamma0Db)).toEqual([4, 8]);
  });
});
