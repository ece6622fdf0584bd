#!/usr/bin/env node
import { loadSpec, render } from "./render.js";

function usage(): never {
  console.error("usage: figure-kit render --spec spec.json [--spec more.json ...]");
  process.exit(2);
}

export function main(argv: string[]): number {
  if (argv[0] !== "render") usage();
  const specs: string[] = [];
  for (let i = 1; i < argv.length; i++) {
    if (argv[i] === "--spec" && i + 1 < argv.length) {
      specs.push(argv[++i]);
    } else {
      usage();
    }
  }
  if (specs.length === 0) usage();
  for (const file of specs) {
    const out = render(loadSpec(file));
    console.log(`rendered ${out}`);
  }
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
