// ViewState and its pure reducer. Every screen change is an AppEvent folded
// into the state; replaying an event log reproduces the screen exactly.
// In-flight requests are tagged with a per-channel generation counter and
// stale responses (older generation than the latest request) are discarded.

import type {
  AttributeValues,
  CommonSolution,
  Differentiated,
  Drilldown,
  Meta,
  SubRegionItem,
  VarietyRank,
} from "./types.js";

export const MAX_SELECTED = 5;
export const DEFAULT_TAU_GRID = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

export type Channel =
  | "attribute"
  | "differentiated"
  | "highlight"
  | "drilldown"
  | "common";

export type Tab = "varieties" | "common" | "variability";

export interface ViewState {
  meta: Meta | null;
  subregions: SubRegionItem[];
  ranking: VarietyRank[];
  tab: Tab;
  attribute: string | null;
  year: number | null;
  attributeValues: AttributeValues | null;
  selectedVarieties: string[];
  brush: { variety: string; range: [number, number] } | null;
  highlighted: string[];
  tau: number;
  differentiated: Differentiated | null;
  selectedSubregion: string | null;
  drilldown: Drilldown | null;
  commonResult: CommonSolution | null;
  commonInfeasible: boolean;
  error: string | null;
  generations: Record<Channel, number>;
}

export function initialState(): ViewState {
  return {
    meta: null,
    subregions: [],
    ranking: [],
    tab: "varieties",
    attribute: null,
    year: null,
    attributeValues: null,
    selectedVarieties: [],
    brush: null,
    highlighted: [],
    tau: 1.0,
    differentiated: null,
    selectedSubregion: null,
    drilldown: null,
    commonResult: null,
    commonInfeasible: false,
    error: null,
    generations: {
      attribute: 0,
      differentiated: 0,
      highlight: 0,
      drilldown: 0,
      common: 0,
    },
  };
}

export type AppEvent =
  | { type: "meta-loaded"; meta: Meta }
  | { type: "subregions-loaded"; subregions: SubRegionItem[] }
  | { type: "ranking-loaded"; ranking: VarietyRank[] }
  | { type: "tab-changed"; tab: Tab }
  | { type: "attribute-selected"; attribute: string }
  | { type: "year-selected"; year: number }
  | { type: "fetch-started"; channel: Channel }
  | { type: "attribute-values"; payload: AttributeValues; generation: number }
  | { type: "variety-toggled"; variety: string }
  | { type: "brush-set"; variety: string; range: [number, number] }
  | { type: "brush-cleared" }
  | { type: "highlights-loaded"; ids: string[]; generation: number }
  | { type: "tau-changed"; value: number }
  | { type: "differentiated-loaded"; payload: Differentiated; generation: number }
  | { type: "subregion-selected"; id: string }
  | { type: "drilldown-loaded"; payload: Drilldown; generation: number }
  | { type: "common-loaded"; payload: CommonSolution; generation: number }
  | { type: "common-infeasible"; generation: number }
  | { type: "selection-cleared" }
  | { type: "error-raised"; message: string }
  | { type: "error-cleared" };

export function snapTau(value: number, grid: number[]): number {
  let best = grid[0];
  for (const tau of grid) {
    if (Math.abs(tau - value) < Math.abs(best - value)) best = tau;
  }
  return best;
}

function fresh(state: ViewState, channel: Channel, generation: number): boolean {
  return generation === state.generations[channel];
}

export function reduce(state: ViewState, event: AppEvent): ViewState {
  switch (event.type) {
    case "meta-loaded":
      return { ...state, meta: event.meta };
    case "subregions-loaded":
      return { ...state, subregions: event.subregions };
    case "ranking-loaded":
      return { ...state, ranking: event.ranking };
    case "tab-changed":
      return { ...state, tab: event.tab };
    case "attribute-selected":
      return { ...state, attribute: event.attribute };
    case "year-selected":
      return { ...state, year: event.year };
    case "fetch-started":
      return {
        ...state,
        generations: {
          ...state.generations,
          [event.channel]: state.generations[event.channel] + 1,
        },
      };
    case "attribute-values":
      if (!fresh(state, "attribute", event.generation)) return state;
      return { ...state, attributeValues: event.payload, error: null };
    case "variety-toggled": {
      const selected = state.selectedVarieties;
      if (selected.includes(event.variety)) {
        return {
          ...state,
          selectedVarieties: selected.filter((v) => v !== event.variety),
          brush:
            state.brush?.variety === event.variety ? null : state.brush,
        };
      }
      if (selected.length >= MAX_SELECTED) return state; // cap holds
      return { ...state, selectedVarieties: [...selected, event.variety] };
    }
    case "brush-set":
      return { ...state, brush: { variety: event.variety, range: event.range } };
    case "brush-cleared":
      return { ...state, brush: null };
    case "highlights-loaded":
      if (!fresh(state, "highlight", event.generation)) return state;
      return { ...state, highlighted: event.ids };
    case "tau-changed": {
      const grid = state.meta?.tau_grid ?? DEFAULT_TAU_GRID;
      return { ...state, tau: snapTau(event.value, grid) };
    }
    case "differentiated-loaded":
      if (!fresh(state, "differentiated", event.generation)) return state;
      return { ...state, differentiated: event.payload, error: null };
    case "subregion-selected":
      return { ...state, selectedSubregion: event.id };
    case "drilldown-loaded":
      if (!fresh(state, "drilldown", event.generation)) return state;
      return { ...state, drilldown: event.payload, error: null };
    case "common-loaded":
      if (!fresh(state, "common", event.generation)) return state;
      return {
        ...state,
        commonResult: event.payload,
        commonInfeasible: false,
        error: null,
      };
    case "common-infeasible":
      if (!fresh(state, "common", event.generation)) return state;
      return { ...state, commonResult: null, commonInfeasible: true };
    case "selection-cleared":
      return {
        ...state,
        selectedVarieties: [],
        brush: null,
        highlighted: [],
        commonResult: null,
        commonInfeasible: false,
      };
    case "error-raised":
      return { ...state, error: event.message };
    case "error-cleared":
      return { ...state, error: null };
  }
}

export function replay(events: AppEvent[], from?: ViewState): ViewState {
  let state = from ?? initialState();
  for (const event of events) state = reduce(state, event);
  return state;
}
