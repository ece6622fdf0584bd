import { readFileSync } from "node:fs";

/** One plotted curve. Values are kept as the exact strings read from the
 * CSV so that downstream consumers can verify the rendered data
 * byte-for-byte; numeric views are derived on demand. */
export interface Series {
  label: string;
  x: string[];
  y: string[];
}

export function toNumbers(raw: string[]): number[] {
  return raw.map(Number);
}

function readTable(file: string): { header: string[]; rows: string[][] } {
  const text = readFileSync(file, "utf8");
  const lines = text.split("\n").filter((ln) => ln.length > 0);
  if (lines.length === 0) {
    throw new Error(`${file}: empty file`);
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((ln) => ln.split(","));
  return { header, rows };
}

function requireColumns(file: string, header: string[], wanted: string[]) {
  for (const col of wanted) {
    if (!header.includes(col)) {
      throw new Error(`${file}: missing column "${col}" (found: ${header.join(", ")})`);
    }
  }
}

export interface SummaryColumn {
  t: string[];
  mean: string[];
  variance: string[];
  se: string[];
}

/** summary.csv: long format `t,observable,mean,var,se,n`. */
export function readSummary(file: string): Map<string, SummaryColumn> {
  const { header, rows } = readTable(file);
  requireColumns(file, header, ["t", "observable", "mean", "var", "se", "n"]);
  const idx = (name: string) => header.indexOf(name);
  const out = new Map<string, SummaryColumn>();
  for (const row of rows) {
    const name = row[idx("observable")];
    let col = out.get(name);
    if (!col) {
      col = { t: [], mean: [], variance: [], se: [] };
      out.set(name, col);
    }
    col.t.push(row[idx("t")]);
    col.mean.push(row[idx("mean")]);
    col.variance.push(row[idx("var")]);
    col.se.push(row[idx("se")]);
  }
  return out;
}

/** theory.csv: long format `t,statistic,value`. */
export function readTheory(file: string): Map<string, { t: string[]; value: string[] }> {
  const { header, rows } = readTable(file);
  requireColumns(file, header, ["t", "statistic", "value"]);
  const idx = (name: string) => header.indexOf(name);
  const out = new Map<string, { t: string[]; value: string[] }>();
  for (const row of rows) {
    const name = row[idx("statistic")];
    let col = out.get(name);
    if (!col) {
      col = { t: [], value: [] };
      out.set(name, col);
    }
    col.t.push(row[idx("t")]);
    col.value.push(row[idx("value")]);
  }
  return out;
}

/** paths/NNNNN.csv: wide format, `t` plus one column per observable. */
export function readPathTable(file: string): Map<string, string[]> {
  const { header, rows } = readTable(file);
  requireColumns(file, header, ["t"]);
  const out = new Map<string, string[]>();
  header.forEach((name, j) => {
    out.set(name, rows.map((row) => row[j]));
  });
  return out;
}

export function summaryColumn(
  file: string,
  table: Map<string, SummaryColumn>,
  observable: string,
): SummaryColumn {
  const col = table.get(observable);
  if (!col) {
    throw new Error(
      `${file}: missing observable "${observable}" (found: ${[...table.keys()].join(", ")})`,
    );
  }
  return col;
}

export function theoryColumn(
  file: string,
  table: Map<string, { t: string[]; value: string[] }>,
  statistic: string,
): { t: string[]; value: string[] } {
  const col = table.get(statistic);
  if (!col) {
    throw new Error(
      `${file}: missing statistic "${statistic}" (found: ${[...table.keys()].join(", ")})`,
    );
  }
  return col;
}
