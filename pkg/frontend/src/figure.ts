// Figure assembly: pick the (axis, metric) series per algorithm and draw an
// SVG line chart.  Plotted values are the CSV values verbatim; no smoothing,
// no interpolation, and absent delay cells are simply skipped.

import { ResultRow } from "./csv.js";

export type Axis = "speed" | "range";
export type Metric = "pdr" | "delay";

export interface FigureSpec {
  axis: Axis;
  metric: Metric;
}

export interface SeriesPoint {
  x: number;
  y: number;
}

export interface Series {
  algorithm: string;
  points: SeriesPoint[];
}

export const AXIS_LABEL: Record<Axis, string> = {
  speed: "Average node speed (m/s)",
  range: "Transmission range (m)",
};

export const METRIC_LABEL: Record<Metric, string> = {
  pdr: "Packet delivery ratio",
  delay: "Average end-to-end delay (us)",
};

const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
  "#17becf", "#e377c2",
];

export function selectSeries(rows: ResultRow[], spec: FigureSpec): Series[] {
  const aggregated = rows.filter(
    (r) => r.seed === "avg" && r.axis === spec.axis,
  );
  const byAlgorithm = new Map<string, SeriesPoint[]>();
  for (const row of aggregated) {
    const y = spec.metric === "pdr" ? row.pdr : row.avgDelayUs;
    if (y === null) continue;
    if (!byAlgorithm.has(row.algorithm)) byAlgorithm.set(row.algorithm, []);
    byAlgorithm.get(row.algorithm)!.push({ x: row.axisValue, y });
  }
  const series = Array.from(byAlgorithm.entries()).map(
    ([algorithm, points]) => ({
      algorithm,
      points: points.slice().sort((a, b) => a.x - b.x),
    }),
  );
  if (series.length === 0) {
    throw new Error(
      `no aggregate rows for axis=${spec.axis}; is this the right CSV?`,
    );
  }
  return series;
}

function niceTicks(lo: number, hi: number, count: number): number[] {
  if (lo === hi) return [lo];
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / (count * step);
  const factor = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const tick = step * factor;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / tick) * tick; v <= hi + tick / 1e6; v += tick) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

const fmt = (v: number): string =>
  Math.abs(v) >= 1000 ? v.toLocaleString("en-US") : String(v);

export function renderSvg(series: Series[], spec: FigureSpec): string {
  const width = 820;
  const height = 520;
  const margin = { left: 90, right: 180, top: 40, bottom: 70 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;

  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const ys = series.flatMap((s) => s.points.map((p) => p.y));
  if (xs.length === 0) {
    throw new Error("nothing to plot: every selected row lacked a value");
  }
  let [xLo, xHi] = [Math.min(...xs), Math.max(...xs)];
  let [yLo, yHi] = [Math.min(...ys), Math.max(...ys)];
  if (xLo === xHi) [xLo, xHi] = [xLo - 1, xHi + 1];
  if (yLo === yHi) [yLo, yHi] = [yLo - 1, yHi + 1];
  const padY = (yHi - yLo) * 0.05;
  yLo -= padY;
  yHi += padY;

  const px = (x: number) => margin.left + ((x - xLo) / (xHi - xLo)) * plotW;
  const py = (y: number) => margin.top + plotH - ((y - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="14">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
  );

  for (const tx of niceTicks(xLo, xHi, 6)) {
    const x = px(tx);
    parts.push(
      `<line x1="${x}" y1="${margin.top}" x2="${x}" y2="${margin.top + plotH}" stroke="#ddd"/>`,
      `<text x="${x}" y="${margin.top + plotH + 20}" text-anchor="middle">${fmt(tx)}</text>`,
    );
  }
  for (const ty of niceTicks(yLo, yHi, 6)) {
    const y = py(ty);
    parts.push(
      `<line x1="${margin.left}" y1="${y}" x2="${margin.left + plotW}" y2="${y}" stroke="#ddd"/>`,
      `<text x="${margin.left - 8}" y="${y + 5}" text-anchor="end">${fmt(ty)}</text>`,
    );
  }
  parts.push(
    `<rect x="${margin.left}" y="${margin.top}" width="${plotW}" height="${plotH}" ` +
      `fill="none" stroke="#333"/>`,
    `<text x="${margin.left + plotW / 2}" y="${height - 18}" text-anchor="middle">` +
      `${AXIS_LABEL[spec.axis]}</text>`,
    `<text x="24" y="${margin.top + plotH / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 24 ${margin.top + plotH / 2})">${METRIC_LABEL[spec.metric]}</text>`,
  );

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const path = s.points.map((p) => `${px(p.x)},${py(p.y)}`).join(" ");
    if (s.points.length > 1) {
      parts.push(
        `<polyline points="${path}" fill="none" stroke="${color}" stroke-width="2"/>`,
      );
    }
    for (const p of s.points) {
      parts.push(
        `<circle cx="${px(p.x)}" cy="${py(p.y)}" r="4" fill="${color}"/>`,
      );
    }
    const ly = margin.top + 10 + i * 24;
    const lx = margin.left + plotW + 16;
    parts.push(
      `<line x1="${lx}" y1="${ly}" x2="${lx + 28}" y2="${ly}" stroke="${color}" stroke-width="2"/>`,
      `<text x="${lx + 34}" y="${ly + 5}">${s.algorithm}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n");
}

export interface FigureDump {
  axis: Axis;
  metric: Metric;
  xLabel: string;
  yLabel: string;
  series: Series[];
}

export function dumpData(series: Series[], spec: FigureSpec): FigureDump {
  return {
    axis: spec.axis,
    metric: spec.metric,
    xLabel: AXIS_LABEL[spec.axis],
    yLabel: METRIC_LABEL[spec.metric],
    series,
  };
}
