"""Build a seeded serving bundle for the frontend e2e tests.

Usage: python build_fixture.py <target_dir>
Prints a JSON config {store_dir, model_dir, index_model, feedback_path}.
"""

import datetime as dt
import json
import sys
from pathlib import Path

from avm.evaluation import SyntheticConfig, generate_synthetic
from avm.listings import encode_many
from avm.regress import ALGORITHMS, save_model
from avm.service import SnapshotStore
from avm.som import SomConfig
from avm.spatial_index import build_index, save_index

TARGET = Path(sys.argv[1])
JUNE = dt.date(2024, 6, 1)

listings, _ = generate_synthetic(SyntheticConfig(n=600, seed=12, noise_sd_chf=120))
for listing in listings:
    listing.snapshot_date = JUNE

store = SnapshotStore(TARGET / "store")
store.append_snapshot(JUNE, listings)

model_dir = TARGET / "models"
model_dir.mkdir(exist_ok=True)
X, y = encode_many(listings)
for kind in ("rf", "knn", "ols"):
    save_model(ALGORITHMS[kind].fit(X, y, 0), kind, model_dir / f"{kind}.json")

save_index(build_index(listings, SomConfig(rows=6, cols=6, epochs=8, seed=1)),
           TARGET / "index.json")

print(json.dumps({
    "store_dir": str(TARGET / "store"),
    "model_dir": str(model_dir),
    "index_model": str(TARGET / "index.json"),
    "feedback_path": str(store.feedback_path),
    "zips": sorted({l.zip for l in listings}),
}))
