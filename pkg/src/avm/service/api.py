"""HTTP JSON API over the engine: estimates, index, analytics, feedback.

Models are loaded once into an immutable ``ModelRegistry``; ``POST
/api/v1/admin/reload`` builds a complete new registry and swaps it in with a
single attribute assignment, so in-flight requests keep the version they
started with and no request ever sees a half-loaded state.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel, ConfigDict, Field

from ..ingest import listings_to_csv_rows
from ..listings import RawListing, RejectReport, validate, encode_features
from ..regress import ALGORITHMS, load_model
from ..spatial_index import NODE_MEDIAN, SAMPLE_DRAW, estimate_index, load_index
from ..analytics import (
    MarketQuery,
    budget_sweep,
    match_histograms,
    zip_availability,
)
from .store import FeedbackRecord, SnapshotStore

_ALL_TIME = (dt.date(1800, 1, 1), dt.date(2999, 12, 31))


@dataclass
class ServeConfig:
    store_dir: str
    model_dir: str
    index_model: Optional[str] = None
    ui_dir: Optional[str] = None


class ModelRegistry:
    """One immutable set of loaded models; replaced wholesale on reload."""

    def __init__(self, regression: dict, index_model, index_path: Optional[str]):
        self.regression = regression          # kind -> (model, meta)
        self.index_model = index_model
        self.index_path = index_path

    @classmethod
    def load(cls, config: ServeConfig) -> "ModelRegistry":
        model_dir = Path(config.model_dir)
        if not model_dir.is_dir():
            raise RuntimeError(f"model directory does not exist: {model_dir}")
        regression = {}
        for kind in ALGORITHMS:
            path = model_dir / f"{kind}.json"
            if path.exists():
                loaded_kind, model, meta = load_model(path)
                regression[loaded_kind] = (model, meta)
        index_model = None
        if config.index_model:
            index_path = Path(config.index_model)
            if not index_path.exists():
                raise RuntimeError(f"index model file does not exist: {index_path}")
            index_model = load_index(index_path)
        if not regression and index_model is None:
            raise RuntimeError(f"no model files found under {model_dir}")
        return cls(regression, index_model, config.index_model)


def _error_response(status: int, errors: list) -> JSONResponse:
    return JSONResponse(status_code=status, content={"errors": errors})


def _field_errors(*pairs) -> list:
    return [{"field": f, "message": m} for f, m in pairs]


class PeriodMixin(BaseModel):
    model_config = ConfigDict(populate_by_name=True)
    from_date: Optional[dt.date] = Field(default=None, alias="from")
    to_date: Optional[dt.date] = Field(default=None, alias="to")

    def period(self) -> tuple:
        return (self.from_date or _ALL_TIME[0], self.to_date or _ALL_TIME[1])


class AvailabilityBody(PeriodMixin):
    min_rooms: float
    min_living_space_m2: float
    max_rent_chf: float
    zips: Optional[list] = None


class BudgetSweepBody(PeriodMixin):
    zip: int
    min_rooms: float
    min_space: float
    budgets: list


class HistogramsBody(BaseModel):
    zip: int
    query: AvailabilityBody
    n_bins: int = 20


class FeedbackBody(BaseModel):
    query_echo: dict
    estimate_chf: float
    user_direction: str
    reason_code: Optional[str] = None
    free_text: Optional[str] = None


def create_app(config: ServeConfig) -> FastAPI:
    app = FastAPI(title="avm", docs_url=None, redoc_url=None)
    app.state.registry = ModelRegistry.load(config)
    app.state.store = SnapshotStore(config.store_dir)
    app.state.config = config

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(_request: Request, exc: RequestValidationError):
        errors = [{"field": ".".join(str(p) for p in err["loc"] if p != "body"),
                   "message": err["msg"]} for err in exc.errors()]
        return _error_response(400, errors)

    @app.get("/api/v1/healthz")
    def healthz():
        registry: ModelRegistry = app.state.registry
        return {
            "status": "ok",
            "models": sorted(registry.regression),
            "index_model": registry.index_model is not None,
            "snapshots": len(app.state.store.manifest),
        }

    @app.get("/api/v1/estimate")
    def estimate(
        rooms: float,
        floor: int,
        zip: int,
        lng: float,
        lat: float,
        property_type: str = Query(alias="type"),
        space: float = Query(alias="space"),
        year: int = Query(alias="year"),
        model: str = "rf",
    ):
        registry: ModelRegistry = app.state.registry
        if model not in registry.regression:
            return _error_response(400, _field_errors(
                ("model", f"model {model!r} not loaded; available: {sorted(registry.regression)}")))
        # rent is the predicted quantity; the validator needs a placeholder
        raw = RawListing(
            listing_id="query", snapshot_date=dt.date.today(), zip=zip,
            property_type=property_type, rooms=rooms, floor=floor,
            living_space_m2=space, year_built=year, gross_rent_chf=1000.0,
            lat=lat, lng=lng)
        checked = validate(raw)
        if isinstance(checked, RejectReport):
            return _error_response(400, [
                {"field": rule.split(":", 1)[0], "message": rule}
                for rule in checked.failed_rules])
        fitted, meta = registry.regression[model]
        features = encode_features(checked).values
        prediction = float(ALGORITHMS[model].predict(fitted, features[None, :])[0])
        return {"estimate_chf": prediction, "model": model,
                "model_version": meta.get("model_version")}

    @app.get("/api/v1/index")
    def index(lat: float, lng: float, k: Optional[int] = None,
              strategy: str = NODE_MEDIAN, seed: Optional[int] = None):
        registry: ModelRegistry = app.state.registry
        if registry.index_model is None:
            return _error_response(400, _field_errors(("strategy", "no index model loaded")))
        if strategy not in (NODE_MEDIAN, SAMPLE_DRAW):
            return _error_response(400, _field_errors(
                ("strategy", f"unknown strategy {strategy!r}")))
        if strategy == SAMPLE_DRAW and seed is None:
            return _error_response(400, _field_errors(
                ("seed", "sample strategy requires an explicit seed for reproducibility")))
        est = estimate_index(registry.index_model, lat, lng, k=k,
                             strategy=strategy, seed=seed or 0)
        return {"price_per_m2": est.price_per_m2, "n_support": est.n_support,
                "strategy": est.strategy, "k_used": est.k_used}

    @app.post("/api/v1/analytics/zip-availability")
    def availability(body: AvailabilityBody):
        listings = app.state.store.query_listings(body.period())
        q = MarketQuery(
            min_rooms=body.min_rooms,
            min_living_space_m2=body.min_living_space_m2,
            max_rent_chf=body.max_rent_chf,
            period=body.period(),
            zips=frozenset(body.zips) if body.zips else None)
        result = zip_availability(listings, q)
        return {"by_zip": {
            str(z): {"n_total": s.n_total, "n_match": s.n_match, "pct": s.pct}
            for z, s in sorted(result.by_zip.items())}}

    @app.post("/api/v1/analytics/budget-sweep")
    def sweep(body: BudgetSweepBody):
        listings = app.state.store.query_listings(body.period())
        curve = budget_sweep(listings, body.zip, body.min_rooms, body.min_space,
                             body.budgets, body.period())
        return {"zip": curve.zip, "budgets": curve.budgets,
                "pct_matched": curve.pct_matched, "n_total": curve.n_total}

    @app.post("/api/v1/analytics/histograms")
    def histograms(body: HistogramsBody):
        listings = app.state.store.query_listings(body.query.period())
        q = MarketQuery(
            min_rooms=body.query.min_rooms,
            min_living_space_m2=body.query.min_living_space_m2,
            max_rent_chf=body.query.max_rent_chf,
            period=body.query.period(),
            zips=None)
        hist = match_histograms(listings, body.zip, q, n_bins=body.n_bins)
        return {
            "zip": hist.zip, "n_total": hist.n_total, "n_match": hist.n_match,
            "dimensions": {
                name: {"bin_edges": h.bin_edges, "total_counts": h.total_counts,
                       "matched_counts": h.matched_counts}
                for name, h in hist.dimensions.items()}}

    @app.get("/api/v1/listings/export")
    def export(from_: Optional[dt.date] = Query(default=None, alias="from"),
               to: Optional[dt.date] = Query(default=None, alias="to"),
               kind: Optional[str] = None, format: str = "jsonl"):
        period = (from_ or _ALL_TIME[0], to or _ALL_TIME[1])
        store: SnapshotStore = app.state.store
        if format == "jsonl":
            return StreamingResponse(store.export_lines(period, kind),
                                     media_type="application/x-ndjson")
        if format == "csv":
            return StreamingResponse(_csv_stream(store, period, kind),
                                     media_type="text/csv")
        return _error_response(400, _field_errors(("format", "use jsonl or csv")))

    @app.post("/api/v1/feedback", status_code=201)
    def feedback(body: FeedbackBody):
        record = FeedbackRecord(
            timestamp=dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
            query_echo=body.query_echo,
            estimate_chf=body.estimate_chf,
            user_direction=body.user_direction,
            reason_code=body.reason_code,
            free_text=body.free_text)
        try:
            app.state.store.append_feedback(record)
        except ValueError as exc:
            return _error_response(400, _field_errors(("user_direction", str(exc))))
        return {"stored": True, "timestamp": record.timestamp}

    @app.post("/api/v1/admin/reload")
    def reload_models():
        registry = ModelRegistry.load(app.state.config)
        app.state.registry = registry  # atomic swap
        return {"reloaded": True, "models": sorted(registry.regression),
                "index_model": registry.index_model is not None}

    if config.ui_dir:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app


def _csv_stream(store: SnapshotStore, period, kind):
    """Row-at-a-time CSV export; the header comes first even when empty."""
    import json as _json

    from ..listings import clean_listing_from_dict

    def generate():
        buf = io.StringIO()
        writer = csv.writer(buf)

        def flush() -> str:
            data = buf.getvalue()
            buf.seek(0)
            buf.truncate(0)
            return data

        writer.writerow(next(listings_to_csv_rows([])))
        yield flush()
        for line in store.export_lines(period, kind):
            listing = clean_listing_from_dict(_json.loads(line))
            rows = listings_to_csv_rows([listing])
            next(rows)  # per-listing header, already emitted once
            writer.writerow(next(rows))
            yield flush()

    return generate()


def serve(config: ServeConfig, host: str = "127.0.0.1", port: int = 8080) -> None:
    """Run the API (blocking)."""
    import uvicorn

    uvicorn.run(create_app(config), host=host, port=port, log_level="info")
