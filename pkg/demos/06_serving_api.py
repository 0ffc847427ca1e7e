# Assemble a serving bundle (snapshot store + model files) and exercise the
# HTTP API in-process. Against a real deployment the same requests go to
# `avm serve --store ... --models ... --index-model ...`.
#
# Run: python demos/06_serving_api.py

import datetime as dt
import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from avm.evaluation import SyntheticConfig, generate_synthetic
from avm.listings import encode_many
from avm.regress import ALGORITHMS, save_model
from avm.service import ServeConfig, SnapshotStore, create_app
from avm.som import SomConfig
from avm.spatial_index import build_index, save_index

root = Path(tempfile.mkdtemp(prefix="avm-demo-"))
june = dt.date(2024, 6, 1)

listings, _ = generate_synthetic(SyntheticConfig(n=1000, seed=2, noise_sd_chf=120))
for listing in listings:
    listing.snapshot_date = june

store = SnapshotStore(root / "store")
summary = store.append_snapshot(june, listings)
print(f"store: added={summary.added} at {root / 'store'}")

model_dir = root / "models"
model_dir.mkdir()
X, y = encode_many(listings)
for kind in ("knn", "rf", "ols"):
    tag = save_model(ALGORITHMS[kind].fit(X, y, 0), kind,
                     model_dir / f"{kind}.json")
    print(f"trained {kind} (version {tag})")
save_index(build_index(listings, SomConfig(rows=8, cols=8, epochs=10, seed=1)),
           root / "index.json")

client = TestClient(create_app(ServeConfig(
    store_dir=str(root / "store"), model_dir=str(model_dir),
    index_model=str(root / "index.json"))))

print("\nGET /api/v1/healthz")
print(" ", client.get("/api/v1/healthz").json())

print("\nGET /api/v1/estimate  (3.5 rooms, 80 m2, 1990, central)")
for kind in ("knn", "rf", "ols"):
    body = client.get("/api/v1/estimate", params={
        "type": "apartment", "rooms": 3.5, "floor": 2, "space": 80,
        "year": 1990, "zip": 8005, "lng": 8.54, "lat": 47.38,
        "model": kind}).json()
    print(f"  {kind:4s} -> {body['estimate_chf']:8.1f} CHF/month")

print("\nGET /api/v1/index at the expensive core vs the periphery")
for name, (lat, lng) in {"core": (47.38, 8.54), "edge": (47.30, 8.40)}.items():
    body = client.get("/api/v1/index", params={"lat": lat, "lng": lng}).json()
    print(f"  {name}: {body['price_per_m2']:.1f} CHF/m2 "
          f"(support {body['n_support']})")

print("\nPOST /api/v1/analytics/budget-sweep for zip 8005")
body = client.post("/api/v1/analytics/budget-sweep", json={
    "zip": 8005, "min_rooms": 2.0, "min_space": 50.0,
    "budgets": [1500, 2500, 3500, 5000]}).json()
print(" ", json.dumps(body))

print("\nPOST /api/v1/feedback (a tenant disagrees)")
resp = client.post("/api/v1/feedback", json={
    "query_echo": {"rooms": 3.5, "zip": 8005}, "estimate_chf": 2800.0,
    "user_direction": "too_high", "reason_code": "renovation",
    "free_text": "needs a new kitchen"})
print(f"  status {resp.status_code}, stored at {store.feedback_path}")

print("\nPOST /api/v1/admin/reload (models re-read, swap is atomic)")
print(" ", client.post("/api/v1/admin/reload").json())
