import { describe, expect, it } from "vitest";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { readPathTable, readSummary, readTheory, summaryColumn } from "../src/csv.js";

const FIXTURES = join(__dirname, "fixtures");

describe("summary.csv parsing", () => {
  it("groups rows by observable and keeps raw strings", () => {
    const table = readSummary(join(FIXTURES, "runA", "summary.csv"));
    const c = table.get("c")!;
    expect(c.t.length).toBe(11);
    expect(c.t[0]).toBe("0.0");
    expect(c.mean[0]).toBe("1.0");
    expect(table.has("sup_vnorm")).toBe(true);
  });

  it("names the missing column in its error", () => {
    const dir = mkdtempSync(join(tmpdir(), "figkit-"));
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "t,observable,mean\n0.0,c,1.0\n");
    expect(() => readSummary(bad)).toThrow(/missing column "var"/);
  });

  it("names the missing observable in its error", () => {
    const file = join(FIXTURES, "runA", "summary.csv");
    const table = readSummary(file);
    expect(() => summaryColumn(file, table, "nope")).toThrow(/missing observable "nope"/);
  });
});

describe("theory.csv parsing", () => {
  it("exposes the closed-form statistics", () => {
    const table = readTheory(join(FIXTURES, "runA", "theory.csv"));
    expect(table.has("var_c0")).toBe(true);
    expect(table.get("mean_c0")!.value[0]).toBe("1.0");
  });
});

describe("path table parsing", () => {
  it("reads wide per-path series", () => {
    const table = readPathTable(join(FIXTURES, "runA", "paths", "00000.csv"));
    expect(table.get("t")!.length).toBe(11);
    expect(table.has("c")).toBe(true);
    expect(table.has("c2")).toBe(true);
  });
});
