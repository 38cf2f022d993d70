/** Deterministic SVG serialization of a figure model. No timestamps, no
 * randomness: identical models yield identical bytes. */

import { FigureModel, PanelModel, xToPx, yToPx } from "./figure.js";

export function fmt(v: number): string {
  // enough digits for the tests to reproduce coordinates exactly
  return String(Number(v.toFixed(3)));
}

function tickLabel(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1000 || a < 0.01) return v.toExponential(1);
  return String(Number(v.toPrecision(4)));
}

function panelSvg(panel: PanelModel): string {
  const parts: string[] = [];
  const left = xToPx(panel, panel.xDomain[0]);
  const right = xToPx(panel, panel.xDomain[1]);
  const bottom = yToPx(panel, panel.yDomain[0]);
  const top = yToPx(panel, panel.yDomain[1]);

  parts.push(
    `<text x="${fmt(panel.x + panel.width / 2)}" y="${fmt(panel.y + 22)}" ` +
      `text-anchor="middle" font-size="15" font-weight="bold">${panel.spec.title}</text>`,
  );
  parts.push(
    `<line x1="${fmt(left)}" y1="${fmt(bottom)}" x2="${fmt(right)}" y2="${fmt(bottom)}" stroke="#333"/>`,
  );
  parts.push(
    `<line x1="${fmt(left)}" y1="${fmt(bottom)}" x2="${fmt(left)}" y2="${fmt(top)}" stroke="#333"/>`,
  );
  for (const t of panel.xTicks) {
    const x = xToPx(panel, t);
    parts.push(`<line x1="${fmt(x)}" y1="${fmt(bottom)}" x2="${fmt(x)}" y2="${fmt(bottom + 4)}" stroke="#333"/>`);
    parts.push(
      `<text x="${fmt(x)}" y="${fmt(bottom + 17)}" text-anchor="middle" font-size="11">${tickLabel(t)}</text>`,
    );
  }
  for (const t of panel.yTicks) {
    const y = yToPx(panel, t);
    parts.push(`<line x1="${fmt(left - 4)}" y1="${fmt(y)}" x2="${fmt(left)}" y2="${fmt(y)}" stroke="#333"/>`);
    parts.push(
      `<text x="${fmt(left - 7)}" y="${fmt(y + 4)}" text-anchor="end" font-size="11">${tickLabel(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${fmt((left + right) / 2)}" y="${fmt(bottom + 33)}" text-anchor="middle" font-size="12">iteration</text>`,
  );
  parts.push(
    `<text x="${fmt(panel.x + 15)}" y="${fmt((top + bottom) / 2)}" text-anchor="middle" font-size="12" ` +
      `transform="rotate(-90 ${fmt(panel.x + 15)} ${fmt((top + bottom) / 2)})">${panel.spec.yLabel}</text>`,
  );
  for (const curve of panel.curves) {
    const points = curve.points.map((p) => `${fmt(p.px)},${fmt(p.py)}`).join(" ");
    const dash = curve.dashed ? ' stroke-dasharray="7,4"' : "";
    parts.push(
      `<polyline data-series="${curve.name}" data-panel="${panel.spec.key}" ` +
        `fill="none" stroke="${curve.color}" stroke-width="1.8"${dash} points="${points}"/>`,
    );
  }
  if (panel.warning) {
    parts.push(
      `<text x="${fmt((left + right) / 2)}" y="${fmt((top + bottom) / 2)}" text-anchor="middle" ` +
        `font-size="13" fill="#b00020">${panel.warning}</text>`,
    );
  }
  return parts.join("\n");
}

export function figureToSvg(model: FigureModel): string {
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${model.width}" height="${model.height}" ` +
      `viewBox="0 0 ${model.width} ${model.height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${model.width}" height="${model.height}" fill="white"/>`);
  for (const panel of model.panels) {
    parts.push(panelSvg(panel));
  }
  // legend strip along the bottom
  const y = model.height - 14;
  const slot = model.width / Math.max(model.legend.length, 1);
  model.legend.forEach((entry, i) => {
    const x = slot * i + slot / 2;
    const dash = entry.dashed ? ' stroke-dasharray="7,4"' : "";
    parts.push(
      `<line x1="${fmt(x - 46)}" y1="${fmt(y - 4)}" x2="${fmt(x - 10)}" y2="${fmt(y - 4)}" ` +
        `stroke="${entry.color}" stroke-width="2.5"${dash} data-legend="${entry.name}"/>`,
    );
    parts.push(`<text x="${fmt(x - 4)}" y="${fmt(y)}" font-size="13">${entry.name}</text>`);
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
