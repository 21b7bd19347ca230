// Sub-regions as centroid dots on an SVG canvas. Two coloring modes:
// attribute values (choropleth) and spatial cohesion at the active tau,
// where sub-regions with no feasible solution render dark-grey.

import { INFEASIBLE_FILL, normalize, scColor, valueColor } from "../color.js";
import { verbatim } from "../format.js";
import type { AttributeValues, Differentiated, SubRegionItem } from "../types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 640;
const HEIGHT = 480;
const MARGIN = 24;

export interface MapProps {
  subregions: SubRegionItem[];
  attributeValues: AttributeValues | null;
  differentiated: Differentiated | null; // when set, color by cohesion
  highlighted: string[];
  selected: string | null;
  onSelect?: (id: string) => void;
}

function project(subregions: SubRegionItem[]): (r: SubRegionItem) => [number, number] {
  const lats = subregions.map((r) => r.lat);
  const lons = subregions.map((r) => r.lon);
  const latLo = Math.min(...lats);
  const latHi = Math.max(...lats);
  const lonLo = Math.min(...lons);
  const lonHi = Math.max(...lons);
  return (r) => [
    MARGIN + normalize(r.lon, lonLo, lonHi) * (WIDTH - 2 * MARGIN),
    HEIGHT - MARGIN - normalize(r.lat, latLo, latHi) * (HEIGHT - 2 * MARGIN),
  ];
}

export function renderMap(container: HTMLElement, props: MapProps): void {
  container.textContent = "";
  if (!props.subregions.length) return;

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("class", "map-canvas");

  const place = project(props.subregions);
  const values = props.attributeValues?.values ?? null;
  const numeric = values ? Object.values(values) : [];
  const lo = numeric.length ? Math.min(...numeric) : 0;
  const hi = numeric.length ? Math.max(...numeric) : 1;
  const highlighted = new Set(props.highlighted);

  for (const region of props.subregions) {
    const [x, y] = place(region);
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", x.toFixed(1));
    dot.setAttribute("cy", y.toFixed(1));
    dot.setAttribute("r", highlighted.has(region.id) ? "9" : "6");
    dot.setAttribute("data-id", region.id);

    let cls = "dot";
    if (props.differentiated) {
      const entry = props.differentiated.subregions[region.id];
      if (!entry || !entry.feasible) {
        cls += " infeasible";
        dot.setAttribute("fill", INFEASIBLE_FILL);
      } else {
        dot.setAttribute("fill", scColor(normalize(entry.sc ?? 0, 0, 0.2)));
      }
    } else if (values && region.id in values) {
      dot.setAttribute("fill", valueColor(normalize(values[region.id], lo, hi)));
    } else {
      dot.setAttribute("fill", "#b8c4cc");
    }
    if (highlighted.has(region.id)) cls += " highlighted";
    if (props.selected === region.id) cls += " selected";
    dot.setAttribute("class", cls);
    if (props.onSelect) {
      dot.addEventListener("click", () => props.onSelect?.(region.id));
    }
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = region.id;
    dot.appendChild(title);
    svg.appendChild(dot);
  }
  container.appendChild(svg);

  const legend = document.createElement("div");
  legend.className = "map-legend";
  if (props.differentiated) {
    legend.textContent = "cohesion (dark-grey: no feasible solution)";
  } else if (values) {
    const min = document.createElement("span");
    min.className = "legend-min";
    min.textContent = verbatim(lo);
    const max = document.createElement("span");
    max.className = "legend-max";
    max.textContent = verbatim(hi);
    const bar = document.createElement("span");
    bar.className = "legend-bar";
    legend.append(min, bar, max);
  } else {
    legend.textContent = "select an attribute and year";
  }
  container.appendChild(legend);
}
