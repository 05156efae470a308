/** Server-side SVG rendering of log-log convergence figures. */

import { createRequire } from "node:module";

// echarts publishes CommonJS types next to an ESM runtime build; loading
// through require keeps both module systems and the SSR renderer happy
const require = createRequire(import.meta.url);
// eslint-disable-next-line @typescript-eslint/no-var-requires
const echarts: typeof import("echarts") = require("echarts");

import type { FittedLine } from "./slopes.js";

export interface PlotJob {
  lines: FittedLine[];
  norm: "energy" | "l2";
  referenceSlopes: number[];
}

/** Dashed reference line err = C h^p anchored at the last data point of
 * the steepest series, shifted down for visibility. */
function referenceSeries(lines: FittedLine[], slope: number) {
  const hAll = lines.flatMap((l) => l.h);
  const hMin = Math.min(...hAll);
  const hMax = Math.max(...hAll);
  const anchor = lines[0];
  const eAnchor = 0.5 * Math.min(...anchor.err);
  const c = eAnchor / Math.pow(hMin, slope);
  return {
    name: `slope ${slope}`,
    type: "line" as const,
    symbol: "none",
    lineStyle: { type: "dashed" as const, width: 1 },
    data: [
      [hMin, c * Math.pow(hMin, slope)],
      [hMax, c * Math.pow(hMax, slope)],
    ],
  };
}

export function renderFigure(job: PlotJob, width = 640, height = 480): string {
  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width,
    height,
  });
  const normName = job.norm === "energy" ? "energy norm" : "L2 norm";
  const caption = job.lines
    .map((l) => `${l.label}: fitted slope ${l.fittedSlope.toFixed(3)}`)
    .join("   ");
  chart.setOption({
    animation: false,
    title: [
      { text: `Convergence history (${normName})`, left: "center" },
      { text: caption, left: "center", bottom: 0, textStyle: { fontSize: 11 } },
    ],
    legend: { top: 28 },
    xAxis: { type: "log", name: "h", nameLocation: "middle" },
    yAxis: { type: "log", name: "error" },
    series: [
      ...job.lines.map((l) => ({
        name: l.label,
        type: "line" as const,
        symbol: "circle",
        data: l.h.map((h, i) => [h, l.err[i]]),
      })),
      ...job.referenceSlopes.map((s) => referenceSeries(job.lines, s)),
    ],
  });
  const svg = chart.renderToSVGString();
  chart.dispose();
  return svg;
}
