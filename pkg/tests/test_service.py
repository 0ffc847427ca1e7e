import datetime as dt
import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from avm.errors import ConflictError
from avm.evaluation import SyntheticConfig, generate_synthetic
from avm.listings import encode_features, encode_many
from avm.regress import ALGORITHMS, save_model
from avm.service import ServeConfig, SnapshotStore, create_app
from avm.service.store import FeedbackRecord
from avm.som import SomConfig
from avm.spatial_index import build_index, estimate_index, save_index

from conftest import make_clean, random_listings

JUNE = dt.date(2024, 6, 1)


def listings_batch(n, start=0, rent_shift=0.0, date=JUNE):
    return [make_clean(listing_id=f"s{start + i:04d}", snapshot_date=date,
                       gross_rent_chf=2000.0 + i + rent_shift) for i in range(n)]


class TestStore:
    def test_append_to_empty_store(self, tmp_path):
        store = SnapshotStore(tmp_path)
        summary = store.append_snapshot(JUNE, listings_batch(100))
        assert (summary.added, summary.duplicates, summary.updated) == (100, 0, 0)

    def test_identical_reappend_is_noop(self, tmp_path):
        store = SnapshotStore(tmp_path)
        batch = listings_batch(100)
        store.append_snapshot(JUNE, batch)
        manifest_before = json.dumps(store.manifest, sort_keys=True)
        summary = store.append_snapshot(JUNE, batch)
        assert (summary.added, summary.duplicates, summary.updated) == (0, 100, 0)
        assert json.dumps(store.manifest, sort_keys=True) == manifest_before

    def test_conflicting_reappend_rejected(self, tmp_path):
        store = SnapshotStore(tmp_path)
        store.append_snapshot(JUNE, listings_batch(10))
        with pytest.raises(ConflictError, match="different content"):
            store.append_snapshot(JUNE, listings_batch(10, rent_shift=5.0))

    def test_overlap_bookkeeping(self, tmp_path):
        store = SnapshotStore(tmp_path)
        store.append_snapshot(JUNE, listings_batch(100))
        day2 = JUNE + dt.timedelta(days=1)
        # 50 listings: ids s0090..s0099 overlap with changed rent, 40 are new
        overlap = [make_clean(listing_id=f"s{90 + i:04d}", snapshot_date=day2,
                              gross_rent_chf=9999.0) for i in range(10)]
        new = [make_clean(listing_id=f"n{i:04d}", snapshot_date=day2)
               for i in range(40)]
        summary = store.append_snapshot(day2, overlap + new)
        assert (summary.added, summary.duplicates, summary.updated) == (40, 0, 10)

    def test_duplicate_id_within_batch_rejected(self, tmp_path):
        store = SnapshotStore(tmp_path)
        batch = listings_batch(2) + listings_batch(1)
        with pytest.raises(ConflictError, match="twice"):
            store.append_snapshot(JUNE, batch)

    def test_snapshot_files_never_rewritten(self, tmp_path):
        store = SnapshotStore(tmp_path)
        store.append_snapshot(JUNE, listings_batch(5))
        path = store.snapshot_dir / f"snapshot-{JUNE.isoformat()}.jsonl"
        original = path.read_bytes()
        store.append_snapshot(JUNE + dt.timedelta(days=1), listings_batch(5, start=100))
        assert path.read_bytes() == original

    def test_query_latest_version_wins(self, tmp_path):
        store = SnapshotStore(tmp_path)
        store.append_snapshot(JUNE, listings_batch(3))
        day2 = JUNE + dt.timedelta(days=2)
        updated = [make_clean(listing_id="s0001", snapshot_date=day2,
                              gross_rent_chf=4444.0)]
        store.append_snapshot(day2, updated)
        got = store.query_listings((JUNE, day2))
        by_id = {l.listing_id: l for l in got}
        assert len(got) == 3
        assert by_id["s0001"].gross_rent_chf == 4444.0

    def test_query_empty_period(self, tmp_path):
        store = SnapshotStore(tmp_path)
        store.append_snapshot(JUNE, listings_batch(3))
        assert store.query_listings((dt.date(2020, 1, 1), dt.date(2020, 2, 1))) == []

    def test_query_matches_brute_force_file_scan(self, tmp_path):
        store = SnapshotStore(tmp_path)
        rng = np.random.default_rng(0)
        dates = [JUNE + dt.timedelta(days=d) for d in range(4)]
        for date in dates:
            ids = rng.choice(60, size=30, replace=False)
            batch = [make_clean(listing_id=f"x{i:03d}", snapshot_date=date,
                                gross_rent_chf=float(1000 + rng.integers(0, 3000)))
                     for i in ids]
            store.append_snapshot(date, batch)

        period = (dates[1], dates[2])
        got = {l.listing_id: l for l in store.query_listings(period)}

        expected = {}
        for date in dates:
            if not (period[0] <= date <= period[1]):
                continue
            path = store.snapshot_dir / f"snapshot-{date.isoformat()}.jsonl"
            for line in path.read_text().splitlines():
                obj = json.loads(line)
                prior = expected.get(obj["listing_id"])
                if prior is None or obj["snapshot_date"] >= prior["snapshot_date"]:
                    expected[obj["listing_id"]] = obj
        assert set(got) == set(expected)
        for key, obj in expected.items():
            assert got[key].gross_rent_chf == obj["gross_rent_chf"]

    def test_export_reingest_identical_dedup_index(self, tmp_path):
        store = SnapshotStore(tmp_path / "a")
        store.append_snapshot(JUNE, random_listings(50, seed=1, base_date=JUNE))
        lines = list(store.export_lines((JUNE, JUNE)))

        from avm.listings import clean_listing_from_dict
        reingested = SnapshotStore(tmp_path / "b")
        batch = [clean_listing_from_dict(json.loads(line)) for line in lines]
        reingested.append_snapshot(JUNE, batch)
        assert reingested.index == store.index

    def test_feedback_round_trip_and_validation(self, tmp_path):
        store = SnapshotStore(tmp_path)
        record = FeedbackRecord(timestamp="2024-06-01T12:00:00+00:00",
                                query_echo={"rooms": 3}, estimate_chf=2500.0,
                                user_direction="too_high", reason_code="view")
        store.append_feedback(record)
        assert store.read_feedback() == [record]

        with pytest.raises(ValueError, match="user_direction"):
            store.append_feedback(FeedbackRecord(
                timestamp="t", query_echo={}, estimate_chf=1.0,
                user_direction="wat"))
        with pytest.raises(ValueError, match="free_text"):
            store.append_feedback(FeedbackRecord(
                timestamp="t", query_echo={}, estimate_chf=1.0,
                user_direction="too_low", free_text="x" * 1001))


@pytest.fixture(scope="module")
def api(tmp_path_factory):
    root = tmp_path_factory.mktemp("service")
    store = SnapshotStore(root / "store")
    listings, _ = generate_synthetic(SyntheticConfig(n=400, seed=3, noise_sd_chf=100))
    for l in listings:
        l.snapshot_date = JUNE
    store.append_snapshot(JUNE, listings)

    model_dir = root / "models"
    model_dir.mkdir()
    X, y = encode_many(listings)
    fitted = {}
    for kind in ("knn", "ols"):
        model = ALGORITHMS[kind].fit(X, y, 0)
        save_model(model, kind, model_dir / f"{kind}.json")
        fitted[kind] = model

    index_model = build_index(listings, SomConfig(rows=4, cols=4, epochs=6, seed=1))
    save_index(index_model, root / "index.json")

    config = ServeConfig(store_dir=str(root / "store"), model_dir=str(model_dir),
                         index_model=str(root / "index.json"))
    app = create_app(config)
    client = TestClient(app)
    return {"client": client, "listings": listings, "fitted": fitted,
            "index_model": index_model, "store": store}


ESTIMATE_PARAMS = {"type": "apartment", "rooms": 3.5, "floor": 2, "space": 80,
                   "year": 1990, "zip": 8005, "lng": 8.52, "lat": 47.39}


class TestApi:
    def test_healthz(self, api):
        body = api["client"].get("/api/v1/healthz").json()
        assert body["status"] == "ok"
        assert body["models"] == ["knn", "ols"]
        assert body["index_model"] is True

    def test_estimate_matches_library_call(self, api):
        for kind in ("knn", "ols"):
            resp = api["client"].get("/api/v1/estimate",
                                     params={**ESTIMATE_PARAMS, "model": kind})
            assert resp.status_code == 200
            body = resp.json()
            fv = encode_features(make_clean())
            expected = float(ALGORITHMS[kind].predict(
                api["fitted"][kind], fv.values[None, :])[0])
            assert body["estimate_chf"] == expected
            assert body["model"] == kind
            assert body["model_version"]

    def test_estimate_validation_maps_to_400(self, api):
        resp = api["client"].get("/api/v1/estimate",
                                 params={**ESTIMATE_PARAMS, "zip": 99, "model": "knn"})
        assert resp.status_code == 400
        errors = resp.json()["errors"]
        assert any(e["field"] == "zip" for e in errors)

    def test_estimate_missing_param_400(self, api):
        params = dict(ESTIMATE_PARAMS)
        params.pop("rooms")
        resp = api["client"].get("/api/v1/estimate", params=params)
        assert resp.status_code == 400

    def test_unknown_model_400(self, api):
        resp = api["client"].get("/api/v1/estimate",
                                 params={**ESTIMATE_PARAMS, "model": "xgb"})
        assert resp.status_code == 400

    def test_index_matches_library_call(self, api):
        resp = api["client"].get("/api/v1/index",
                                 params={"lat": 47.38, "lng": 8.54, "k": 3,
                                         "strategy": "median"})
        assert resp.status_code == 200
        expected = estimate_index(api["index_model"], 47.38, 8.54, k=3)
        assert resp.json()["price_per_m2"] == expected.price_per_m2
        assert resp.json()["n_support"] == expected.n_support

    def test_index_sample_requires_seed(self, api):
        resp = api["client"].get("/api/v1/index",
                                 params={"lat": 47.38, "lng": 8.54,
                                         "strategy": "sample"})
        assert resp.status_code == 400
        ok = api["client"].get("/api/v1/index",
                               params={"lat": 47.38, "lng": 8.54,
                                       "strategy": "sample", "seed": 9})
        assert ok.status_code == 200
        again = api["client"].get("/api/v1/index",
                                  params={"lat": 47.38, "lng": 8.54,
                                          "strategy": "sample", "seed": 9})
        assert ok.json() == again.json()

    def test_zip_availability_matches_library(self, api):
        from avm.analytics import MarketQuery, zip_availability
        body = {"min_rooms": 2.0, "min_living_space_m2": 50.0,
                "max_rent_chf": 3000.0, "from": "2024-06-01", "to": "2024-06-30"}
        resp = api["client"].post("/api/v1/analytics/zip-availability", json=body)
        assert resp.status_code == 200
        q = MarketQuery(2.0, 50.0, 3000.0, (JUNE, dt.date(2024, 6, 30)))
        expected = zip_availability(api["store"].query_listings(q.period), q)
        got = resp.json()["by_zip"]
        assert set(got) == {str(z) for z in expected.by_zip}
        for z, stats in expected.by_zip.items():
            assert got[str(z)]["n_total"] == stats.n_total
            assert got[str(z)]["n_match"] == stats.n_match
            assert got[str(z)]["pct"] == stats.pct

    def test_budget_sweep_endpoint(self, api):
        from avm.analytics import budget_sweep
        zips = sorted({l.zip for l in api["listings"]})
        body = {"zip": zips[0], "min_rooms": 2.0, "min_space": 40.0,
                "budgets": [1000, 2000, 4000, 8000],
                "from": "2024-06-01", "to": "2024-06-30"}
        resp = api["client"].post("/api/v1/analytics/budget-sweep", json=body)
        assert resp.status_code == 200
        expected = budget_sweep(api["store"].query_listings((JUNE, dt.date(2024, 6, 30))),
                                zips[0], 2.0, 40.0, body["budgets"],
                                (JUNE, dt.date(2024, 6, 30)))
        assert resp.json()["pct_matched"] == expected.pct_matched

    def test_histograms_endpoint(self, api):
        zips = sorted({l.zip for l in api["listings"]})
        body = {"zip": zips[0], "n_bins": 10,
                "query": {"min_rooms": 2.0, "min_living_space_m2": 50.0,
                          "max_rent_chf": 3000.0,
                          "from": "2024-06-01", "to": "2024-06-30"}}
        resp = api["client"].post("/api/v1/analytics/histograms", json=body)
        assert resp.status_code == 200
        dims = resp.json()["dimensions"]
        assert set(dims) == {"rooms", "living_space_m2", "gross_rent_chf"}
        for dim in dims.values():
            assert all(m <= t for m, t in
                       zip(dim["matched_counts"], dim["total_counts"]))

    def test_feedback_round_trip(self, api):
        body = {"query_echo": ESTIMATE_PARAMS, "estimate_chf": 2500.0,
                "user_direction": "too_high", "reason_code": "renovation",
                "free_text": "street noise"}
        resp = api["client"].post("/api/v1/feedback", json=body)
        assert resp.status_code == 201
        stored = api["store"].read_feedback()
        assert stored[-1].user_direction == "too_high"
        assert stored[-1].free_text == "street noise"

    def test_feedback_bad_direction_400(self, api):
        resp = api["client"].post("/api/v1/feedback", json={
            "query_echo": {}, "estimate_chf": 1.0, "user_direction": "shrug"})
        assert resp.status_code == 400

    def test_export_jsonl_matches_store(self, api):
        resp = api["client"].get("/api/v1/listings/export",
                                 params={"format": "jsonl"})
        assert resp.status_code == 200
        api_lines = [l for l in resp.text.splitlines() if l]
        store_lines = [l.strip() for l in api["store"].export_lines(
            (dt.date(1800, 1, 1), dt.date(2999, 12, 31)))]
        assert api_lines == store_lines

    def test_export_csv_has_header(self, api):
        resp = api["client"].get("/api/v1/listings/export",
                                 params={"format": "csv", "from": "1900-01-01",
                                         "to": "1900-01-02"})
        assert resp.status_code == 200
        assert resp.text.splitlines()[0].startswith("listing_id,")
        assert len(resp.text.splitlines()) == 1  # empty period: header only

    def test_reload_swaps_models(self, api):
        before = api["client"].get("/api/v1/estimate",
                                   params={**ESTIMATE_PARAMS, "model": "knn"}).json()
        resp = api["client"].post("/api/v1/admin/reload")
        assert resp.status_code == 200
        assert resp.json()["reloaded"] is True
        after = api["client"].get("/api/v1/estimate",
                                  params={**ESTIMATE_PARAMS, "model": "knn"}).json()
        assert before == after


def test_missing_model_dir_fails_startup(tmp_path):
    (tmp_path / "store").mkdir()
    with pytest.raises(RuntimeError, match="model"):
        create_app(ServeConfig(store_dir=str(tmp_path / "store"),
                               model_dir=str(tmp_path / "nope")))
