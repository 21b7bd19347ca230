import { describe, expect, it } from "vitest";

import {
  AppEvent,
  initialState,
  reduce,
  replay,
  snapTau,
} from "../src/state.js";
import type { Meta } from "../src/types.js";

const meta: Meta = {
  weather_attributes: ["temperature", "precipitation", "solar_radiation"],
  soil_attributes: ["soil_ph", "soil_organic_matter", "soil_cec"],
  varieties: ["V1", "V2", "V3", "V4", "V5", "V6"],
  years: [2000, 2009],
  forecast_year: 2010,
  tau_grid: [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
  bins: { r: 10, lo: 0, hi: 80, edges: [] },
  summary: {
    subregions: 1,
    solved: 1,
    average_yield: 50,
    average_sd: 1,
    average_offset_pct: 2,
  },
};

describe("reducer purity", () => {
  it("does not mutate the previous state", () => {
    const before = initialState();
    const frozen = JSON.stringify(before);
    reduce(before, { type: "variety-toggled", variety: "V1" });
    reduce(before, { type: "tau-changed", value: 0.33 });
    expect(JSON.stringify(before)).toBe(frozen);
  });

  it("is deterministic for the same (state, event)", () => {
    const state = reduce(initialState(), { type: "meta-loaded", meta });
    const event: AppEvent = { type: "variety-toggled", variety: "V2" };
    expect(reduce(state, event)).toEqual(reduce(state, event));
  });

  it("replaying an event log reproduces the state", () => {
    const log: AppEvent[] = [
      { type: "meta-loaded", meta },
      { type: "variety-toggled", variety: "V1" },
      { type: "variety-toggled", variety: "V2" },
      { type: "tau-changed", value: 0.42 },
      { type: "fetch-started", channel: "highlight" },
      { type: "highlights-loaded", ids: ["R1"], generation: 1 },
      { type: "variety-toggled", variety: "V1" },
    ];
    let sequential = initialState();
    for (const event of log) sequential = reduce(sequential, event);
    expect(replay(log)).toEqual(sequential);
  });
});

describe("selection cap", () => {
  it("never holds more than five varieties", () => {
    let state = initialState();
    for (const v of ["V1", "V2", "V3", "V4", "V5", "V6"]) {
      state = reduce(state, { type: "variety-toggled", variety: v });
    }
    expect(state.selectedVarieties).toEqual(["V1", "V2", "V3", "V4", "V5"]);
    // the rejected sixth toggle left the state unchanged entirely
    const again = reduce(state, { type: "variety-toggled", variety: "V6" });
    expect(again).toBe(state);
  });

  it("toggling off removes and frees a slot", () => {
    let state = initialState();
    for (const v of ["V1", "V2", "V3", "V4", "V5"]) {
      state = reduce(state, { type: "variety-toggled", variety: v });
    }
    state = reduce(state, { type: "variety-toggled", variety: "V3" });
    state = reduce(state, { type: "variety-toggled", variety: "V6" });
    expect(state.selectedVarieties).toEqual(["V1", "V2", "V4", "V5", "V6"]);
  });
});

describe("tau slider", () => {
  it("snaps to the 0.1 grid", () => {
    expect(snapTau(0.33, meta.tau_grid)).toBeCloseTo(0.3, 12);
    expect(snapTau(0.97, meta.tau_grid)).toBeCloseTo(1.0, 12);
    expect(snapTau(-5, meta.tau_grid)).toBeCloseTo(0.1, 12);
    let state = reduce(initialState(), { type: "meta-loaded", meta });
    state = reduce(state, { type: "tau-changed", value: 0.44 });
    expect(state.tau).toBeCloseTo(0.4, 12);
    expect(meta.tau_grid).toContain(state.tau);
  });
});

describe("stale responses", () => {
  it("discards payloads from superseded requests", () => {
    let state = initialState();
    state = reduce(state, { type: "fetch-started", channel: "highlight" }); // gen 1
    state = reduce(state, { type: "fetch-started", channel: "highlight" }); // gen 2
    const stale = reduce(state, {
      type: "highlights-loaded",
      ids: ["OLD"],
      generation: 1,
    });
    expect(stale.highlighted).toEqual([]);
    const current = reduce(state, {
      type: "highlights-loaded",
      ids: ["NEW"],
      generation: 2,
    });
    expect(current.highlighted).toEqual(["NEW"]);
  });

  it("tracks channels independently", () => {
    let state = initialState();
    state = reduce(state, { type: "fetch-started", channel: "highlight" });
    state = reduce(state, { type: "fetch-started", channel: "drilldown" });
    const updated = reduce(state, {
      type: "highlights-loaded",
      ids: ["R9"],
      generation: 1,
    });
    expect(updated.highlighted).toEqual(["R9"]);
  });
});

describe("errors", () => {
  it("an API failure raises the banner without touching data", () => {
    let state = reduce(initialState(), { type: "meta-loaded", meta });
    const failed = reduce(state, {
      type: "error-raised",
      message: "unknown-attribute: no such attribute",
    });
    expect(failed.error).toMatch("unknown-attribute");
    expect(failed.meta).toBe(state.meta);
    expect(reduce(failed, { type: "error-cleared" }).error).toBeNull();
  });
});
