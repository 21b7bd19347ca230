// Ranked variety list: expected weight, histogram of default-solution
// weights across sub-regions (clicking a bar brushes that weight range),
// and click-to-toggle selection capped at five.

import { verbatim } from "../format.js";
import type { VarietyRank } from "../types.js";

export interface VarietyListProps {
  ranking: VarietyRank[];
  selected: string[];
  brush: { variety: string; range: [number, number] } | null;
  onToggle?: (variety: string) => void;
  onBrush?: (variety: string, range: [number, number]) => void;
}

export function renderVarietyList(container: HTMLElement, props: VarietyListProps): void {
  container.textContent = "";
  const list = document.createElement("ul");
  list.className = "variety-list";

  for (const rank of props.ranking) {
    const row = document.createElement("li");
    row.className = "variety-row";
    row.dataset.variety = rank.variety_id;
    if (props.selected.includes(rank.variety_id)) row.classList.add("selected");

    const name = document.createElement("button");
    name.className = "variety-name";
    name.textContent = rank.variety_id;
    name.addEventListener("click", () => props.onToggle?.(rank.variety_id));

    const weight = document.createElement("span");
    weight.className = "expected-weight";
    weight.textContent = verbatim(rank.expected_weight);

    const hist = document.createElement("span");
    hist.className = "weight-histogram";
    const peak = Math.max(1, ...rank.histogram);
    rank.histogram.forEach((count, i) => {
      const bar = document.createElement("button");
      bar.className = "hist-bar";
      bar.style.height = `${(count / peak) * 100}%`;
      bar.title = `${verbatim(rank.histogram_edges[i])}-${verbatim(rank.histogram_edges[i + 1])}: ${verbatim(count)}`;
      const active =
        props.brush?.variety === rank.variety_id &&
        props.brush.range[0] === rank.histogram_edges[i];
      if (active) bar.classList.add("brushed");
      bar.addEventListener("click", () =>
        props.onBrush?.(rank.variety_id, [
          rank.histogram_edges[i],
          rank.histogram_edges[i + 1],
        ]),
      );
      hist.appendChild(bar);
    });

    const count = document.createElement("span");
    count.className = "holder-count";
    count.textContent = verbatim(rank.subregions_with_weight);

    row.append(name, weight, hist, count);
    list.appendChild(row);
  }
  container.appendChild(list);
}
