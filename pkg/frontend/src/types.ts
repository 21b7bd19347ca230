// Payload shapes of the seedmix HTTP JSON API. The client performs no
// domain arithmetic: every number it shows comes verbatim from one of these.

export interface BinInfo {
  r: number;
  lo: number;
  hi: number;
  edges: number[];
}

export interface Summary {
  subregions: number;
  solved: number;
  average_yield: number | null;
  average_sd: number | null;
  average_offset_pct: number | null;
}

export interface Meta {
  weather_attributes: string[];
  soil_attributes: string[];
  varieties: string[];
  years: [number, number];
  forecast_year: number;
  tau_grid: number[];
  bins: BinInfo;
  summary: Summary;
}

export interface SolutionEntry {
  variety_id: string;
  weight: number;
}

export interface Solution {
  tau: number;
  entries: SolutionEntry[];
  expected_yield: number;
  variability: number;
  sd: number;
  offset_pct: number | null;
}

export interface CommonSolution extends Solution {
  region_yield: number;
}

export interface SubRegionItem {
  id: string;
  lat: number;
  lon: number;
  default_solution?: Solution;
  sc?: number;
}

export interface AttributeValues {
  attribute: string;
  year: number;
  values: Record<string, number>;
}

export interface VarietyRank {
  variety_id: string;
  expected_weight: number;
  histogram: number[];
  histogram_edges: number[];
  subregions_with_weight: number;
}

export interface TopKEntry {
  variety_id: string;
  score: number;
  e: number;
  var: number;
  weight: number;
  subregion_count: number;
  distribution: number[];
}

export interface Drilldown {
  id: string;
  top_k: TopKEntry[];
  default: Solution | null;
}

export interface DifferentiatedEntry {
  solution: Solution | null;
  sc: number | null;
  feasible: boolean;
}

export interface Differentiated {
  tau: number;
  subregions: Record<string, DifferentiatedEntry>;
}

export interface Highlights {
  sub_region_ids: string[];
}

export interface ProblemDetail {
  status: number;
  code: string;
  message: string;
}
