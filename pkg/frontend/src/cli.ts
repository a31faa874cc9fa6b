/**
 * Figure driver: `node dist/cli.js <kind> <input> [-o output.svg]`.
 * Exit 0 on success, 2 on usage/parse errors (offending file named).
 */

import { writeFileSync } from "node:fs";

import { FIGURE_KINDS, FigureKind, renderFigure } from "./figures.js";
import { ParseError } from "./formats.js";

export function main(argv: string[]): number {
  const args = [...argv];
  let output: string | undefined;
  const rest: string[] = [];
  while (args.length > 0) {
    const a = args.shift()!;
    if (a === "-o" || a === "--output") {
      output = args.shift();
      if (output === undefined) {
        console.error("missing value for -o");
        return 2;
      }
    } else {
      rest.push(a);
    }
  }
  if (rest.length !== 2) {
    console.error(`usage: plot <kind> <input> [-o output.svg]\nkinds: ${FIGURE_KINDS.join(", ")}`);
    return 2;
  }
  const [kind, input] = rest;
  if (!(FIGURE_KINDS as readonly string[]).includes(kind)) {
    console.error(`unknown figure kind ${JSON.stringify(kind)}; expected one of ${FIGURE_KINDS.join(", ")}`);
    return 2;
  }
  const out = output ?? `${kind}.svg`;
  let svg: string;
  try {
    svg = renderFigure({ kind: kind as FigureKind, input, output: out });
  } catch (err) {
    if (err instanceof ParseError) {
      console.error(`parse error: ${err.message}`);
      return 2;
    }
    throw err;
  }
  writeFileSync(out, svg);
  console.log(`wrote ${out} (${svg.length} bytes)`);
  return 0;
}

/** Entry point used by the driver and the per-kind wrapper scripts. */
export function runAndExit(argv: string[]): never {
  process.exit(main(argv));
}
