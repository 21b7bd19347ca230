"""Read-only HTTP JSON API over a solution atlas.

Every endpoint derives from the immutable atlas plus pure recomputation;
nothing mutates state, so concurrent identical requests return identical
bodies. Errors use a problem-detail shape {status, code, message}.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import pipeline
from .errors import UnknownCategoryError
from .optimizer import MAX_VARIETIES, TAU_GRID
from .pipeline import SolutionAtlas, tau_key


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message


class CommonSolutionRequest(BaseModel):
    varieties: list[str] = Field(min_length=1)
    tau: float | None = None


class HighlightRequest(BaseModel):
    varieties: list[str]
    weight_range: tuple[float, float] | None = None


def _parse_tau(raw: str) -> float:
    try:
        tau = float(raw)
    except ValueError:
        raise ApiError(400, "bad-tau", f"tau must be a number, got {raw!r}") from None
    for grid_tau in TAU_GRID:
        if abs(tau - grid_tau) < 1e-9:
            return grid_tau
    raise ApiError(
        400, "bad-tau", f"tau must be one of {[tau_key(t) for t in TAU_GRID]}"
    )


def create_app(atlas: SolutionAtlas | str | Path, static_dir: str | Path | None = None) -> FastAPI:
    if not isinstance(atlas, SolutionAtlas):
        atlas = SolutionAtlas.load(atlas)

    # computed once at startup; both derive purely from the atlas
    ranking = pipeline.prevalence_ranking(atlas)
    drilldowns = _build_drilldowns(atlas)

    app = FastAPI(title="seedmix", docs_url=None, redoc_url=None)

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"status": exc.status, "code": exc.code, "message": exc.message},
        )

    @app.get("/api/meta")
    def meta():
        doc = atlas.doc
        return {
            "weather_attributes": doc["weather_attributes"],
            "soil_attributes": doc["soil_attributes"],
            "varieties": doc["varieties"],
            "years": doc["years"],
            "forecast_year": doc["forecast_year"],
            "tau_grid": doc["tau_grid"],
            "bins": doc["bins"],
            "summary": doc["summary"],
        }

    @app.get("/api/subregions")
    def subregions():
        out = []
        for rid in atlas.subregion_ids():
            entry = atlas.subregions[rid]
            item = {"id": rid, "lat": entry["lat"], "lon": entry["lon"]}
            if entry["default"] is not None:
                item["default_solution"] = entry["default"]
                sc = entry["sc"].get(tau_key(entry["default"]["tau"]))
                if sc is not None:
                    item["sc"] = sc
            out.append(item)
        return out

    @app.get("/api/attributes/{name}")
    def attribute_values(name: str, year: int):
        doc = atlas.doc
        is_weather = name in doc["weather_attributes"]
        is_soil = name in doc["soil_attributes"]
        if not is_weather and not is_soil:
            raise ApiError(404, "unknown-attribute", f"unknown attribute {name!r}")
        values = {}
        if is_weather:
            y_lo, y_hi = doc["years"]
            if not y_lo <= year <= y_hi:
                raise ApiError(
                    404, "year-out-of-range", f"year {year} outside [{y_lo}, {y_hi}]"
                )
            for rid in atlas.subregion_ids():
                values[rid] = atlas.subregions[rid]["weather"][name][str(year)]
        else:
            # soil attributes are static; any year maps to the same values
            for rid in atlas.subregion_ids():
                values[rid] = atlas.subregions[rid]["soil"][name]
        return {"attribute": name, "year": year, "values": values}

    @app.get("/api/subregions/{rid}/topk")
    def topk(rid: str):
        if rid not in atlas.subregions:
            raise ApiError(404, "unknown-subregion", f"unknown sub-region {rid!r}")
        return drilldowns[rid]

    @app.get("/api/varieties")
    def varieties():
        return [
            {
                "variety_id": p.variety,
                "expected_weight": p.expected_weight,
                "histogram": p.histogram,
                "histogram_edges": p.histogram_edges,
                "subregions_with_weight": sum(p.histogram),
            }
            for p in ranking
        ]

    @app.post("/api/solutions/common")
    def common(req: CommonSolutionRequest):
        if len(req.varieties) > MAX_VARIETIES:
            raise ApiError(
                400, "too-many-varieties", f"choose at most {MAX_VARIETIES} varieties"
            )
        tau = None if req.tau is None else _parse_tau(str(req.tau))
        try:
            solution = pipeline.common_solution(atlas, req.varieties, tau)
        except UnknownCategoryError as exc:
            raise ApiError(400, "unknown-variety", str(exc)) from None
        except ValueError as exc:
            raise ApiError(400, "bad-request", str(exc)) from None
        if solution is None:
            raise ApiError(
                422, "infeasible", "no feasible mix at any variability threshold"
            )
        body = solution.to_json()
        body["region_yield"] = solution.expected_yield
        return body

    @app.get("/api/solutions/differentiated")
    def differentiated(tau: str):
        grid_tau = _parse_tau(tau)
        key = tau_key(grid_tau)
        out = {}
        for rid in atlas.subregion_ids():
            entry = atlas.subregions[rid]
            sol = entry["solutions"].get(key)
            out[rid] = {
                "solution": sol,
                "sc": entry["sc"].get(key),
                "feasible": sol is not None,
            }
        return {"tau": grid_tau, "subregions": out}

    @app.post("/api/highlight")
    def highlight(req: HighlightRequest):
        ids = pipeline.highlight_subregions(atlas, req.varieties, req.weight_range)
        return {"sub_region_ids": ids}

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def _build_drilldowns(atlas: SolutionAtlas) -> dict:
    """Per-sub-region top-k panels with default weights and atlas-wide counts."""
    counts = atlas.doc["topk_counts"]
    out = {}
    for rid in atlas.subregion_ids():
        entry = atlas.subregions[rid]
        default = atlas.default_of(rid)
        items = []
        for row in entry["top_k"]:
            code = row["variety_id"]
            items.append(
                {
                    "variety_id": code,
                    "score": row["score"],
                    "e": row["e"],
                    "var": row["var"],
                    "weight": 0.0 if default is None else default.weight_of(code),
                    "subregion_count": counts.get(code, 0),
                    "distribution": row["distribution"],
                }
            )
        out[rid] = {"id": rid, "top_k": items, "default": entry["default"]}
    return out
