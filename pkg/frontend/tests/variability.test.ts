// Variability-slider behavior against the high-variance fixture: sub-regions
// with no feasible solution at the chosen threshold render dark-grey.

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { INFEASIBLE_FILL } from "../src/color.js";
import { renderMap } from "../src/render/map.js";
import { container, installDom } from "./dom.js";

const HIGHVAR = process.env.SEEDMIX_HIGHVAR_URL!;
const MAIN = process.env.SEEDMIX_MAIN_URL!;

describe("dark-grey infeasible sub-regions", () => {
  it("tau 0.1 on the high-variance fixture renders at least one", async () => {
    const doc = installDom();
    const api = new ApiClient(HIGHVAR);
    const subregions = await api.subregions();
    const differentiated = await api.differentiated(0.1);
    const el = container(doc);
    renderMap(el, {
      subregions,
      attributeValues: null,
      differentiated,
      highlighted: [],
      selected: null,
    });
    const grey = el.querySelectorAll("circle.infeasible");
    expect(grey.length).toBeGreaterThanOrEqual(1);
    expect(grey[0].getAttribute("fill")).toBe(INFEASIBLE_FILL);
    expect(el.textContent).toContain("dark-grey");
  });

  it("tau 1.0 leaves every solvable sub-region colored", async () => {
    const doc = installDom();
    const api = new ApiClient(HIGHVAR);
    const subregions = await api.subregions();
    const differentiated = await api.differentiated(1.0);
    const el = container(doc);
    renderMap(el, {
      subregions,
      attributeValues: null,
      differentiated,
      highlighted: [],
      selected: null,
    });
    expect(el.querySelectorAll("circle.infeasible").length).toBe(0);
  });

  it("the main fixture is fully feasible at tau 1.0", async () => {
    const api = new ApiClient(MAIN);
    const differentiated = await api.differentiated(1.0);
    const entries = Object.values(differentiated.subregions);
    expect(entries.every((e) => e.feasible)).toBe(true);
  });
});
