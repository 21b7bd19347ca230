// Per-sub-region panel: the top-k varieties with their optimal-solution
// weights, the red atlas-wide count bar (click to highlight those
// sub-regions), and a sparkline of each predicted yield distribution.

import { verbatim } from "../format.js";
import type { Drilldown } from "../types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const SPARK_W = 80;
const SPARK_H = 18;

function sparkline(distribution: number[]): SVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${SPARK_W} ${SPARK_H}`);
  svg.setAttribute("class", "sparkline");
  const peak = Math.max(1e-12, ...distribution);
  const step = SPARK_W / distribution.length;
  distribution.forEach((p, i) => {
    const bar = document.createElementNS(SVG_NS, "rect");
    const h = (p / peak) * (SPARK_H - 2);
    bar.setAttribute("x", (i * step).toFixed(2));
    bar.setAttribute("y", (SPARK_H - h).toFixed(2));
    bar.setAttribute("width", Math.max(1, step - 0.6).toFixed(2));
    bar.setAttribute("height", h.toFixed(2));
    svg.appendChild(bar);
  });
  return svg;
}

export interface DrilldownProps {
  drilldown: Drilldown | null;
  onCountClick?: (variety: string) => void;
}

export function renderDrilldown(container: HTMLElement, props: DrilldownProps): void {
  container.textContent = "";
  if (!props.drilldown) {
    const hint = document.createElement("p");
    hint.className = "drilldown-hint";
    hint.textContent = "click a sub-region on the map";
    container.appendChild(hint);
    return;
  }

  const heading = document.createElement("h3");
  heading.textContent = props.drilldown.id;
  container.appendChild(heading);

  const table = document.createElement("table");
  table.className = "topk-table";
  const head = document.createElement("tr");
  for (const label of ["variety", "score", "weight", "sub-regions", "distribution"]) {
    const th = document.createElement("th");
    th.textContent = label;
    head.appendChild(th);
  }
  table.appendChild(head);

  const peakCount = Math.max(1, ...props.drilldown.top_k.map((e) => e.subregion_count));
  for (const entry of props.drilldown.top_k) {
    const tr = document.createElement("tr");
    tr.className = "topk-row";

    const name = document.createElement("td");
    name.textContent = entry.variety_id;
    const score = document.createElement("td");
    score.textContent = verbatim(entry.score);
    const weight = document.createElement("td");
    weight.textContent = verbatim(entry.weight);

    const count = document.createElement("td");
    const bar = document.createElement("button");
    bar.className = "count-bar";
    bar.style.width = `${(entry.subregion_count / peakCount) * 100}%`;
    bar.textContent = verbatim(entry.subregion_count);
    bar.addEventListener("click", () => props.onCountClick?.(entry.variety_id));
    count.appendChild(bar);

    const spark = document.createElement("td");
    spark.appendChild(sparkline(entry.distribution));

    tr.append(name, score, weight, count, spark);
    table.appendChild(tr);
  }
  container.appendChild(table);
}
