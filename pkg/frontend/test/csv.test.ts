import { readFileSync } from "node:fs";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { parseNumber, parseThetaCsv, parseTrialCsv, TRIAL_HEADER } from "../src/csv.js";

const CELL = fileURLToPath(
  new URL("./fixtures/onemax-compatible-safe-asng-d10", import.meta.url));

describe("parseNumber", () => {
  it("reads the non-finite spellings used by the producer", () => {
    expect(parseNumber("inf", "x")).toBe(Infinity);
    expect(parseNumber("-inf", "x")).toBe(-Infinity);
    expect(Number.isNaN(parseNumber("nan", "x"))).toBe(true);
    expect(parseNumber("0.30000000000000004", "x")).toBeCloseTo(0.3, 12);
  });

  it("rejects junk with the location in the message", () => {
    expect(() => parseNumber("", "f.csv:3")).toThrow("f.csv:3");
    expect(() => parseNumber("1.2.3", "f.csv:3")).toThrow("malformed");
  });
});

describe("parseTrialCsv on real output", () => {
  it("round-trips a produced trial file", () => {
    const path = join(CELL, "trial_00.csv");
    const series = parseTrialCsv(readFileSync(path, "utf8"), path);
    expect(series.trial).toBe(0);
    expect(series.iterations[0]).toBe(1);
    expect(series.iterations.length).toBe(40);
    expect(series.termination).toBe("iteration-budget");
    expect(series.gap.every((v) => Number.isFinite(v))).toBe(true);
    expect(series.unsafe.every((v) => v >= 0)).toBe(true);
    // evals grow by lambda=2 per iteration on top of the safe seeds
    expect(series.evals[1] - series.evals[0]).toBe(2);
  });
});

describe("parseTrialCsv validation", () => {
  const rows = (body: string) => `${TRIAL_HEADER}\n${body}`;

  it("accepts inf gaps and keeps them infinite", () => {
    const text = rows("1,1,2,-inf,inf,0,1.0,\n1,2,4,3.0,2.0,1,0.5,optimum\n");
    const series = parseTrialCsv(text);
    expect(series.gap[0]).toBe(Infinity);
    expect(series.bestSafeF[0]).toBe(-Infinity);
    expect(series.termination).toBe("optimum");
  });

  it("rejects a wrong header", () => {
    expect(() => parseTrialCsv("a,b,c\n1,2,3\n", "t.csv")).toThrow("t.csv:1");
  });

  it("rejects wrong column counts", () => {
    expect(() => parseTrialCsv(rows("1,1,2,3.0\n"), "t.csv")).toThrow("t.csv:2");
  });

  it("rejects a termination reason before the final row", () => {
    const text = rows("1,1,2,3.0,1.0,0,1.0,optimum\n1,2,4,3.0,1.0,0,1.0,optimum\n");
    expect(() => parseTrialCsv(text)).toThrow("before the final row");
  });

  it("rejects a missing final termination reason", () => {
    expect(() => parseTrialCsv(rows("1,1,2,3.0,1.0,0,1.0,\n"))).toThrow("no termination");
  });

  it("rejects mixed trial ids", () => {
    const text = rows("1,1,2,3.0,1.0,0,1.0,\n2,2,4,3.0,1.0,0,1.0,optimum\n");
    expect(() => parseTrialCsv(text)).toThrow("mixed trial ids");
  });

  it("rejects empty and header-only files", () => {
    expect(() => parseTrialCsv("")).toThrow("empty");
    expect(() => parseTrialCsv(`${TRIAL_HEADER}\n`)).toThrow("no data rows");
  });
});

describe("parseThetaCsv", () => {
  it("reads a produced trace including the initial snapshot", () => {
    const path = join(CELL, "trial_00_theta.csv");
    const trace = parseThetaCsv(readFileSync(path, "utf8"), path);
    expect(trace.d).toBe(10);
    expect(trace.iterations[0]).toBe(0);
    expect(trace.theta.every((row) => row.length === 10)).toBe(true);
    expect(trace.theta.flat().every((v) => v >= 0.1 && v <= 0.9)).toBe(true);
  });

  it("rejects malformed headers and short rows", () => {
    expect(() => parseThetaCsv("iter,theta_1\n0,0.5\n")).toThrow("expected header");
    expect(() => parseThetaCsv("iter,theta_0,theta_1\n0,0.5\n", "t.csv")).toThrow("t.csv:2");
  });
});
