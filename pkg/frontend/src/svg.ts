import { Series, toNumbers } from "./csv.js";

export type LineStyle = "solid" | "dashed" | "dashdot";

export interface StyledSeries extends Series {
  style: LineStyle;
}

export interface Axes {
  xlabel?: string;
  ylabel?: string;
  xscale?: "linear" | "log";
  yscale?: "linear" | "log";
  title?: string;
}

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { left: 70, right: 20, top: 40, bottom: 50 };
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const DASHES: Record<LineStyle, string> = {
  solid: "none",
  dashed: "8 5",
  dashdot: "8 4 2 4",
};

function scaleOf(kind: "linear" | "log", lo: number, hi: number, outLo: number, outHi: number) {
  if (kind === "log") {
    const llo = Math.log10(lo);
    const lhi = Math.log10(hi);
    return (v: number) => outLo + ((Math.log10(v) - llo) / (lhi - llo || 1)) * (outHi - outLo);
  }
  return (v: number) => outLo + ((v - lo) / (hi - lo || 1)) * (outHi - outLo);
}

function extent(values: number[], logScale: boolean): [number, number] {
  const usable = logScale ? values.filter((v) => v > 0) : values;
  if (usable.length === 0) {
    throw new Error("no plottable values (log scale requires positive data)");
  }
  return [Math.min(...usable), Math.max(...usable)];
}

function ticks(kind: "linear" | "log", lo: number, hi: number, n = 6): number[] {
  if (kind === "log") {
    const out: number[] = [];
    for (let e = Math.ceil(Math.log10(lo)); e <= Math.floor(Math.log10(hi)); e++) {
      out.push(10 ** e);
    }
    return out.length >= 2 ? out : [lo, hi];
  }
  const step = (hi - lo) / (n - 1);
  return Array.from({ length: n }, (_, i) => lo + i * step);
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return String(Number(v.toPrecision(4)));
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Render styled series to a self-contained SVG document.  The exact input
 * strings are embedded in a <metadata> block so the rendered artifact can be
 * checked against its CSV sources byte-for-byte. */
export function renderSvg(series: StyledSeries[], axes: Axes): string {
  if (series.length === 0) {
    throw new Error("figure has no series");
  }
  for (const s of series) {
    if (s.x.length === 0 || s.y.length === 0) {
      throw new Error(`series "${s.label}" is empty`);
    }
    if (s.x.length !== s.y.length) {
      throw new Error(`series "${s.label}" has mismatched x/y lengths`);
    }
  }
  const xscale = axes.xscale ?? "linear";
  const yscale = axes.yscale ?? "linear";
  const xs = series.flatMap((s) => toNumbers(s.x));
  const ys = series.flatMap((s) => toNumbers(s.y));
  const [x0, x1] = extent(xs, xscale === "log");
  const [y0, y1] = extent(ys, yscale === "log");
  const px = scaleOf(xscale, x0, x1, MARGIN.left, WIDTH - MARGIN.right);
  const py = scaleOf(yscale, y0, y1, HEIGHT - MARGIN.bottom, MARGIN.top);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`,
  );
  const payload = series.map((s) => ({ label: s.label, style: s.style, x: s.x, y: s.y }));
  parts.push(`<metadata id="series-data">${esc(JSON.stringify(payload))}</metadata>`);
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);

  for (const tv of ticks(xscale, x0, x1)) {
    const gx = px(tv);
    parts.push(
      `<line x1="${gx}" y1="${MARGIN.top}" x2="${gx}" y2="${HEIGHT - MARGIN.bottom}" stroke="#ddd"/>`,
      `<text x="${gx}" y="${HEIGHT - MARGIN.bottom + 18}" text-anchor="middle">${fmt(tv)}</text>`,
    );
  }
  for (const tv of ticks(yscale, y0, y1)) {
    const gy = py(tv);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${gy}" x2="${WIDTH - MARGIN.right}" y2="${gy}" stroke="#ddd"/>`,
      `<text x="${MARGIN.left - 8}" y="${gy + 4}" text-anchor="end">${fmt(tv)}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${WIDTH - MARGIN.left - MARGIN.right}" ` +
      `height="${HEIGHT - MARGIN.top - MARGIN.bottom}" fill="none" stroke="black"/>`,
  );

  series.forEach((s, i) => {
    const color = COLORS[i % COLORS.length];
    const pts = s.x
      .map((xv, j) => [Number(xv), Number(s.y[j])])
      .filter(([xv, yv]) => (xscale !== "log" || xv > 0) && (yscale !== "log" || yv > 0))
      .map(([xv, yv]) => `${px(xv).toFixed(2)},${py(yv).toFixed(2)}`)
      .join(" ");
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.5" ` +
        `stroke-dasharray="${DASHES[s.style]}"/>`,
    );
    const ly = MARGIN.top + 16 + 16 * i;
    const lx = WIDTH - MARGIN.right - 170;
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 28}" y2="${ly - 4}" stroke="${color}" ` +
        `stroke-width="1.5" stroke-dasharray="${DASHES[s.style]}"/>`,
      `<text x="${lx + 34}" y="${ly}">${esc(s.label)}</text>`,
    );
  });

  if (axes.title) {
    parts.push(
      `<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="15">${esc(axes.title)}</text>`,
    );
  }
  if (axes.xlabel) {
    parts.push(
      `<text x="${(MARGIN.left + WIDTH - MARGIN.right) / 2}" y="${HEIGHT - 12}" ` +
        `text-anchor="middle">${esc(axes.xlabel)}</text>`,
    );
  }
  if (axes.ylabel) {
    const cy = (MARGIN.top + HEIGHT - MARGIN.bottom) / 2;
    parts.push(
      `<text x="16" y="${cy}" text-anchor="middle" transform="rotate(-90 16 ${cy})">` +
        `${esc(axes.ylabel)}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

/** Recover the embedded data series from a rendered SVG. */
export function extractSeries(svg: string): { label: string; style: LineStyle; x: string[]; y: string[] }[] {
  const m = svg.match(/<metadata id="series-data">([\s\S]*?)<\/metadata>/);
  if (!m) {
    throw new Error("SVG carries no embedded series data");
  }
  const text = m[1].replace(/&lt;/g, "<").replace(/&gt;/g, ">").replace(/&amp;/g, "&");
  return JSON.parse(text);
}
