/** Figure model: the four-panel summary laid out as pure data, so tests can
 * check curve values against the CSV exactly before any SVG is emitted.
 *
 * Color convention: multi-fidelity blue, single-fidelity orange, baseline
 * green; the deterministic variant is dashed to separate it from the
 * stochastic one within a color.
 */

import { AggregateSeries, MetricName } from "./csv.js";

export const SERIES_COLORS: Record<string, string> = {
  multi: "#1f77b4", // blue
  single: "#ff7f0e", // orange
  none: "#2ca02c", // green (known-density baseline)
};

export interface PanelSpec {
  key: MetricName;
  title: string;
  yLabel: string;
  /** series without an estimate carry NaN here and are omitted */
  requiresEstimate: boolean;
}

export const PANELS: PanelSpec[] = [
  { key: "cum_regret", title: "(a) cumulative coverage regret", yLabel: "cumulative regret", requiresEstimate: false },
  { key: "mse", title: "(b) estimate MSE", yLabel: "mean squared error", requiresEstimate: true },
  { key: "max_var", title: "(c) max posterior variance", yLabel: "max variance", requiresEstimate: true },
  { key: "mean_distance", title: "(d) mean distance travelled", yLabel: "distance", requiresEstimate: false },
];

export interface FigureOptions {
  width?: number;
  height?: number;
  logy?: boolean;
  /** series names that should be present; absentees trigger per-panel warnings */
  expected?: string[];
}

export const EXPECTED_SERIES = [
  "baseline",
  "dmlc_multi",
  "dmlc_single",
  "smlc_multi",
  "smlc_single",
];

export interface CurvePoint {
  iteration: number;
  value: number;
  px: number;
  py: number;
}

export interface Curve {
  name: string;
  color: string;
  dashed: boolean;
  points: CurvePoint[];
}

export interface PanelModel {
  spec: PanelSpec;
  x: number;
  y: number;
  width: number;
  height: number;
  xDomain: [number, number];
  yDomain: [number, number];
  logy: boolean;
  curves: Curve[];
  warning: string | null;
  xTicks: number[];
  yTicks: number[];
}

export interface FigureModel {
  width: number;
  height: number;
  panels: PanelModel[];
  legend: { name: string; color: string; dashed: boolean }[];
}

export function seriesName(s: AggregateSeries): string {
  return s.algorithm === "baseline" ? "baseline" : `${s.algorithm}_${s.fidelityMode}`;
}

export function seriesColor(s: AggregateSeries): string {
  const key = s.algorithm === "baseline" ? "none" : s.fidelityMode;
  return SERIES_COLORS[key] ?? "#555555";
}

export function seriesDashed(s: AggregateSeries): boolean {
  return s.algorithm === "dmlc";
}

const MARGIN = { left: 64, right: 16, top: 40, bottom: 44 };

export function xToPx(panel: { x: number; width: number; xDomain: [number, number] }, it: number): number {
  const [lo, hi] = panel.xDomain;
  const f = hi === lo ? 0.5 : (it - lo) / (hi - lo);
  return panel.x + MARGIN.left + f * (panel.width - MARGIN.left - MARGIN.right);
}

export function yToPx(
  panel: { y: number; height: number; yDomain: [number, number]; logy: boolean },
  value: number,
): number {
  const [lo, hi] = panel.yDomain;
  const v = panel.logy ? Math.log10(value) : value;
  const l = panel.logy ? Math.log10(lo) : lo;
  const h = panel.logy ? Math.log10(hi) : hi;
  const f = h === l ? 0.5 : (v - l) / (h - l);
  return panel.y + panel.height - MARGIN.bottom - f * (panel.height - MARGIN.top - MARGIN.bottom);
}

function niceTicks(lo: number, hi: number, n = 5): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / n)));
  const candidates = [step, 2 * step, 2.5 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => span / s <= n + 1) ?? 10 * step;
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / chosen) * chosen; t <= hi + 1e-12 * span; t += chosen) {
    ticks.push(Number(t.toPrecision(12)));
  }
  return ticks;
}

export function buildFigure(seriesList: AggregateSeries[], opts: FigureOptions = {}): FigureModel {
  const width = opts.width ?? 1280;
  const height = opts.height ?? 920;
  const logy = opts.logy ?? false;
  const legendHeight = 36;
  const panelW = width / 2;
  const panelH = (height - legendHeight) / 2;

  const ordered = [...seriesList].sort((a, b) => seriesName(a).localeCompare(seriesName(b)));
  const expected = opts.expected ?? EXPECTED_SERIES;
  const panels: PanelModel[] = PANELS.map((spec, i) => {
    const px = (i % 2) * panelW;
    const py = Math.floor(i / 2) * panelH;
    const usable = ordered.filter((s) => {
      if (spec.requiresEstimate && s.algorithm === "baseline") return false;
      return s.rows.some((r) => Number.isFinite(r.mean[spec.key]));
    });
    // the baseline keeps no estimate, so its absence from the estimate
    // panels is by design, not a missing series
    const expectedHere = expected.filter(
      (name) => !(spec.requiresEstimate && name === "baseline"),
    );
    const present = new Set(usable.map(seriesName));
    const missing = expectedHere.filter((name) => !present.has(name));
    const warning = missing.length > 0 ? `missing series: ${missing.join(", ")}` : null;

    let xMin = Infinity;
    let xMax = -Infinity;
    let yMin = Infinity;
    let yMax = -Infinity;
    for (const s of usable) {
      for (const r of s.rows) {
        const v = r.mean[spec.key];
        if (!Number.isFinite(v)) continue;
        xMin = Math.min(xMin, r.iteration);
        xMax = Math.max(xMax, r.iteration);
        if (!logy || v > 0) {
          yMin = Math.min(yMin, v);
          yMax = Math.max(yMax, v);
        }
      }
    }
    if (!Number.isFinite(xMin)) {
      xMin = 0;
      xMax = 1;
      yMin = 0;
      yMax = 1;
    }
    if (!logy) yMin = Math.min(0, yMin);
    if (yMax === yMin) yMax = yMin + 1;

    const panelGeom = {
      x: px,
      y: py,
      width: panelW,
      height: panelH,
      xDomain: [xMin, xMax] as [number, number],
      yDomain: [yMin, yMax] as [number, number],
      logy,
    };
    const curves: Curve[] = usable.map((s) => ({
      name: seriesName(s),
      color: seriesColor(s),
      dashed: seriesDashed(s),
      points: s.rows
        .filter((r) => Number.isFinite(r.mean[spec.key]) && (!logy || r.mean[spec.key] > 0))
        .map((r) => ({
          iteration: r.iteration,
          value: r.mean[spec.key],
          px: xToPx(panelGeom, r.iteration),
          py: yToPx(panelGeom, r.mean[spec.key]),
        })),
    }));

    return {
      spec,
      ...panelGeom,
      curves,
      warning,
      xTicks: niceTicks(xMin, xMax),
      yTicks: logy ? [] : niceTicks(yMin, yMax),
    };
  });

  return {
    width,
    height,
    panels,
    legend: ordered.map((s) => ({
      name: seriesName(s),
      color: seriesColor(s),
      dashed: seriesDashed(s),
    })),
  };
}
