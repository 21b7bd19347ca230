// Common-solution what-if panel: chips for the selected varieties, the
// query button (disabled with nothing selected), and the returned mix
// displayed exactly as the API sent it.

import { pct, verbatim } from "../format.js";
import type { CommonSolution } from "../types.js";

export interface CommonPanelProps {
  selected: string[];
  result: CommonSolution | null;
  infeasible: boolean;
  onQuery?: () => void;
}

export function renderCommonPanel(container: HTMLElement, props: CommonPanelProps): void {
  container.textContent = "";

  const chips = document.createElement("div");
  chips.className = "selected-chips";
  if (props.selected.length === 0) {
    chips.textContent = "select up to five varieties from the list";
  } else {
    for (const code of props.selected) {
      const chip = document.createElement("span");
      chip.className = "chip";
      chip.textContent = code;
      chips.appendChild(chip);
    }
  }
  container.appendChild(chips);

  const query = document.createElement("button");
  query.className = "query-button";
  query.textContent = "Query";
  query.disabled = props.selected.length === 0;
  query.addEventListener("click", () => props.onQuery?.());
  container.appendChild(query);

  if (props.infeasible) {
    const msg = document.createElement("p");
    msg.className = "infeasible-message";
    msg.textContent = "no feasible mix under any variability threshold";
    container.appendChild(msg);
    return;
  }
  if (!props.result) return;

  const table = document.createElement("table");
  table.className = "common-result";
  for (const entry of props.result.entries) {
    const tr = document.createElement("tr");
    const name = document.createElement("td");
    name.textContent = entry.variety_id;
    const weight = document.createElement("td");
    weight.className = "weight";
    weight.textContent = verbatim(entry.weight);
    tr.append(name, weight);
    table.appendChild(tr);
  }
  container.appendChild(table);

  const stats = document.createElement("dl");
  stats.className = "common-stats";
  const rows: Array<[string, string]> = [
    ["region yield", verbatim(props.result.region_yield)],
    ["S.D.", verbatim(props.result.sd)],
    ["offset", pct(props.result.offset_pct)],
    ["variability", verbatim(props.result.variability)],
    ["tau", verbatim(props.result.tau)],
  ];
  for (const [label, value] of rows) {
    const dt = document.createElement("dt");
    dt.textContent = label;
    const dd = document.createElement("dd");
    dd.textContent = value;
    stats.append(dt, dd);
  }
  container.appendChild(stats);
}
