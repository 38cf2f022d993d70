/** Discovery of aggregate CSVs in a compare output directory and end-to-end
 * figure rendering. */

import * as fs from "node:fs";
import * as path from "node:path";

import { AggregateSeries, parseAggregateCsv } from "./csv.js";
import { buildFigure, FigureModel, FigureOptions } from "./figure.js";
import { figureToSvg } from "./svg.js";

export class RenderError extends Error {}

export function discoverSeries(metricsDir: string): AggregateSeries[] {
  let entries: string[];
  try {
    entries = fs.readdirSync(metricsDir);
  } catch {
    throw new RenderError(`metrics directory not readable: ${metricsDir}`);
  }
  const series: AggregateSeries[] = [];
  for (const name of entries.sort()) {
    if (!name.endsWith("_agg.csv")) continue;
    const full = path.join(metricsDir, name);
    series.push(parseAggregateCsv(fs.readFileSync(full, "utf8"), full));
  }
  if (series.length === 0) {
    throw new RenderError(`no aggregate series (*_agg.csv) found in ${metricsDir}`);
  }
  return series;
}

export interface RenderResult {
  figure: FigureModel;
  outputPath: string;
  warnings: string[];
}

export async function renderFigure(
  metricsDir: string,
  outDir: string,
  format: "svg" | "png" = "svg",
  opts: FigureOptions = {},
): Promise<RenderResult> {
  const series = discoverSeries(metricsDir);
  const figure = buildFigure(series, opts);
  const svg = figureToSvg(figure);
  fs.mkdirSync(outDir, { recursive: true });
  const outputPath = path.join(outDir, `summary.${format}`);
  if (format === "svg") {
    fs.writeFileSync(outputPath, svg);
  } else {
    let Resvg;
    try {
      ({ Resvg } = await import("@resvg/resvg-js"));
    } catch {
      throw new RenderError(
        "png output needs @resvg/resvg-js (npm install); use --format svg instead",
      );
    }
    const png = new Resvg(svg, { fitTo: { mode: "width", value: figure.width } })
      .render()
      .asPng();
    fs.writeFileSync(outputPath, png);
  }
  const warnings = figure.panels.flatMap((p) =>
    p.warning ? [`${p.spec.key}: ${p.warning}`] : [],
  );
  return { figure, outputPath, warnings };
}
