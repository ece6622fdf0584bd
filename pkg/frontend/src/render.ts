import { readFileSync, writeFileSync, mkdirSync } from "node:fs";
import { dirname } from "node:path";
import { buildFigure, FigureSpec } from "./figures.js";
import { renderSvg } from "./svg.js";

export function loadSpec(file: string): FigureSpec {
  const spec = JSON.parse(readFileSync(file, "utf8"));
  if (!spec.figure || !spec.output) {
    throw new Error(`${file}: spec needs "figure" and "output" fields`);
  }
  return spec;
}

export function render(spec: FigureSpec): string {
  const { series, axes } = buildFigure(spec);
  const svg = renderSvg(series, axes);
  mkdirSync(dirname(spec.output), { recursive: true });
  writeFileSync(spec.output, svg);
  return spec.output;
}
