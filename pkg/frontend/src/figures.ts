import {
  readPathTable,
  readSummary,
  readTheory,
  summaryColumn,
  theoryColumn,
} from "./csv.js";
import { Axes, StyledSeries } from "./svg.js";

export type FigureId =
  | "pathwise"
  | "var-c"
  | "mean-c"
  | "omega-stats"
  | "v-growth"
  | "error-order"
  | "mean-v";

export interface FigureInput {
  summary?: string;
  theory?: string;
  path?: string;
  label?: string;
  columns?: string[];
  sigma?: number | string;
}

export interface FigureSpec {
  figure: FigureId;
  inputs: FigureInput[];
  output: string;
  axes?: Axes;
}

function need<T>(value: T | undefined, what: string): T {
  if (value === undefined) {
    throw new Error(`figure spec input is missing ${what}`);
  }
  return value;
}

function summarySeries(
  input: FigureInput,
  observable: string,
  field: "mean" | "variance",
  label: string,
  style: StyledSeries["style"],
): StyledSeries {
  const file = need(input.summary, "a summary CSV");
  const col = summaryColumn(file, readSummary(file), observable);
  return { label, style, x: col.t, y: col[field] };
}

function theorySeries(
  input: FigureInput,
  statistic: string,
  label: string,
  style: StyledSeries["style"],
): StyledSeries {
  const file = need(input.theory, "a theory CSV");
  const col = theoryColumn(file, readTheory(file), statistic);
  return { label, style, x: col.t, y: col.value };
}

/** Overlay of per-path time series (e.g. frozen-frame c against the
 * hierarchy members c0/c2 on the same driving noise). */
function pathwise(spec: FigureSpec): StyledSeries[] {
  const out: StyledSeries[] = [];
  for (const input of spec.inputs) {
    const file = need(input.path, "a path CSV");
    const table = readPathTable(file);
    const t = table.get("t")!;
    const columns = need(input.columns, "a column list");
    columns.forEach((name, i) => {
      const y = table.get(name);
      if (!y) {
        throw new Error(`${file}: missing column "${name}" (found: ${[...table.keys()].join(", ")})`);
      }
      out.push({
        label: input.label ? `${input.label} ${name}` : name,
        style: i === 0 ? "solid" : "dashed",
        x: t,
        y,
      });
    });
  }
  return out;
}

/** Empirical amplitude variance against the order-0 closed form. */
function varC(spec: FigureSpec): StyledSeries[] {
  const out: StyledSeries[] = [];
  for (const input of spec.inputs) {
    const tag = input.label ? ` (${input.label})` : "";
    out.push(summarySeries(input, "c", "variance", `Var[c]${tag}`, "solid"));
    out.push(theorySeries(input, "var_c0", `Var[c0] theory${tag}`, "dashed"));
  }
  return out;
}

/** Mean-amplitude ladder: empirical mean against the order-2 mean and the
 * order-0 closed form. */
function meanC(spec: FigureSpec): StyledSeries[] {
  const out: StyledSeries[] = [];
  for (const input of spec.inputs) {
    out.push(summarySeries(input, "c", "mean", "E[c] empirical", "solid"));
    out.push(summarySeries(input, "c2", "mean", "E[c2] empirical", "dashdot"));
    out.push(theorySeries(input, "mean_c0", "E[c0] theory", "dashed"));
  }
  return out;
}

/** Phase-shift mean and variance against the order-0 closed forms. */
function omegaStats(spec: FigureSpec): StyledSeries[] {
  const out: StyledSeries[] = [];
  for (const input of spec.inputs) {
    out.push(summarySeries(input, "omega", "mean", "E[omega]", "solid"));
    out.push(theorySeries(input, "mean_omega0", "E[omega0] theory", "dashed"));
    out.push(summarySeries(input, "omega", "variance", "Var[omega]", "solid"));
    out.push(theorySeries(input, "var_omega0", "Var[omega0] theory", "dashed"));
  }
  return out;
}

/** Perturbation growth over time, one curve per noise level, log-x. */
function vGrowth(spec: FigureSpec): StyledSeries[] {
  return spec.inputs.map((input) =>
    summarySeries(input, "sup_vnorm", "mean", input.label ?? "sup |v|", "solid"),
  );
}

/** Remainder size at the final time against sigma, log-log; slopes above
 * 3 (amplitude) and 2 (perturbation) are the expected orders. */
function errorOrder(spec: FigureSpec): StyledSeries[] {
  const sigmas: string[] = [];
  const cErr: string[] = [];
  const vErr: string[] = [];
  for (const input of spec.inputs) {
    const file = need(input.summary, "a summary CSV");
    const table = readSummary(file);
    sigmas.push(String(need(input.sigma, "a sigma value")));
    const c = summaryColumn(file, table, "sup_c_err2");
    const v = summaryColumn(file, table, "sup_v_err1");
    cErr.push(c.mean[c.mean.length - 1]);
    vErr.push(v.mean[v.mean.length - 1]);
  }
  return [
    { label: "sup |c - c2|", style: "solid", x: sigmas, y: cErr },
    { label: "sup |v - v1|", style: "dashed", x: sigmas, y: vErr },
  ];
}

/** Mean perturbation norm over time. */
function meanV(spec: FigureSpec): StyledSeries[] {
  return spec.inputs.map((input) =>
    summarySeries(input, "vnorm", "mean", input.label ?? "E|v|", "solid"),
  );
}

const BUILDERS: Record<FigureId, (spec: FigureSpec) => StyledSeries[]> = {
  pathwise,
  "var-c": varC,
  "mean-c": meanC,
  "omega-stats": omegaStats,
  "v-growth": vGrowth,
  "error-order": errorOrder,
  "mean-v": meanV,
};

const DEFAULT_AXES: Record<FigureId, Axes> = {
  pathwise: { xlabel: "t", ylabel: "c", title: "Pathwise amplitude tracking" },
  "var-c": { xlabel: "t", ylabel: "variance", title: "Amplitude variance vs theory" },
  "mean-c": { xlabel: "t", ylabel: "mean amplitude", title: "Mean amplitude ladder" },
  "omega-stats": { xlabel: "t", ylabel: "phase statistics", title: "Phase-shift statistics" },
  "v-growth": { xlabel: "t", ylabel: "mean sup |v|", xscale: "log", title: "Perturbation growth" },
  "error-order": {
    xlabel: "sigma",
    ylabel: "mean sup error",
    xscale: "log",
    yscale: "log",
    title: "Remainder order",
  },
  "mean-v": { xlabel: "t", ylabel: "mean |v|", title: "Mean perturbation size" },
};

export function buildFigure(spec: FigureSpec): { series: StyledSeries[]; axes: Axes } {
  const builder = BUILDERS[spec.figure];
  if (!builder) {
    throw new Error(
      `unknown figure id "${spec.figure}" (expected one of: ${Object.keys(BUILDERS).join(", ")})`,
    );
  }
  if (!spec.inputs || spec.inputs.length === 0) {
    throw new Error(`figure "${spec.figure}" has no inputs`);
  }
  return { series: builder(spec), axes: { ...DEFAULT_AXES[spec.figure], ...spec.axes } };
}
