#!/usr/bin/env node
/** CLI: mfcoverage-plots render --metrics <dir> --out <dir>
 *                              [--format png|svg] [--logy]
 *
 * Renders the four-panel summary figure from a compare output directory.
 * Exit 0 on success (missing individual series only warn), 1 when nothing
 * can be rendered, 2 on usage errors.
 */

import { renderFigure, RenderError } from "./render.js";
import { CsvFormatError } from "./csv.js";

function usage(): void {
  console.error(
    "usage: mfcoverage-plots render --metrics <dir> --out <dir> [--format png|svg] [--logy]",
  );
}

interface Args {
  metrics: string;
  out: string;
  format: "svg" | "png";
  logy: boolean;
}

export function parseArgs(argv: string[]): Args | null {
  if (argv[0] !== "render") return null;
  const args: Args = { metrics: "", out: "", format: "svg", logy: false };
  for (let i = 1; i < argv.length; i++) {
    switch (argv[i]) {
      case "--metrics":
        args.metrics = argv[++i] ?? "";
        break;
      case "--out":
        args.out = argv[++i] ?? "";
        break;
      case "--format": {
        const v = argv[++i];
        if (v !== "svg" && v !== "png") return null;
        args.format = v;
        break;
      }
      case "--logy":
        args.logy = true;
        break;
      default:
        return null;
    }
  }
  if (!args.metrics || !args.out) return null;
  return args;
}

export async function main(argv: string[]): Promise<number> {
  const args = parseArgs(argv);
  if (args === null) {
    usage();
    return 2;
  }
  try {
    const result = await renderFigure(args.metrics, args.out, args.format, {
      logy: args.logy,
    });
    for (const warning of result.warnings) {
      console.error(`warning: ${warning}`);
    }
    console.log(`wrote ${result.outputPath}`);
    return 0;
  } catch (err) {
    if (err instanceof RenderError || err instanceof CsvFormatError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
