/** Server-side SVG rendering of chart options (no DOM needed). */

import fs from "node:fs";
import path from "node:path";

import * as echarts from "echarts";
import type { EChartsOption } from "echarts";

export function renderToSvg(
  option: EChartsOption,
  width = 900,
  height = 620,
): string {
  const chart = echarts.init(null, null, { renderer: "svg", ssr: true, width, height });
  try {
    chart.setOption(option);
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}

export function writeSvg(outPath: string, svg: string): void {
  fs.mkdirSync(path.dirname(path.resolve(outPath)), { recursive: true });
  fs.writeFileSync(outPath, svg, "utf8");
}
