import type {
  AttributeValues,
  CommonSolution,
  Differentiated,
  Drilldown,
  Highlights,
  Meta,
  ProblemDetail,
  SubRegionItem,
  VarietyRank,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parse<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail: ProblemDetail | null = null;
    try {
      detail = (await response.json()) as ProblemDetail;
    } catch {
      // non-JSON error body; fall through to the generic message
    }
    throw new ApiError(
      response.status,
      detail?.code ?? "http-error",
      detail?.message ?? `request failed with status ${response.status}`,
    );
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  private get<T>(path: string): Promise<T> {
    return fetch(this.base + path).then((r) => parse<T>(r));
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return fetch(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => parse<T>(r));
  }

  meta(): Promise<Meta> {
    return this.get("/api/meta");
  }

  subregions(): Promise<SubRegionItem[]> {
    return this.get("/api/subregions");
  }

  attribute(name: string, year: number): Promise<AttributeValues> {
    return this.get(`/api/attributes/${encodeURIComponent(name)}?year=${year}`);
  }

  topk(subregion: string): Promise<Drilldown> {
    return this.get(`/api/subregions/${encodeURIComponent(subregion)}/topk`);
  }

  varieties(): Promise<VarietyRank[]> {
    return this.get("/api/varieties");
  }

  common(varieties: string[], tau?: number): Promise<CommonSolution> {
    const body: { varieties: string[]; tau?: number } = { varieties };
    if (tau !== undefined) body.tau = tau;
    return this.post("/api/solutions/common", body);
  }

  differentiated(tau: number): Promise<Differentiated> {
    return this.get(`/api/solutions/differentiated?tau=${tau}`);
  }

  highlight(varieties: string[], range?: [number, number]): Promise<Highlights> {
    const body: { varieties: string[]; weight_range?: [number, number] } = {
      varieties,
    };
    if (range) body.weight_range = range;
    return this.post("/api/highlight", body);
  }
}
