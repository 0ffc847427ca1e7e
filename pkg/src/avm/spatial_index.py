"""Rough rental price index (CHF per m2 per month) over coordinates.

A SOM is trained on (lat, lng, price_per_m2) of clean listings. For a query
coordinate the k codebook nodes nearest in the (lat, lng) plane are selected
and turned into an estimate by one of two strategies:

* ``median``: median of the selected nodes' denormalized price components,
  deterministic, the serving default;
* ``sample``: one training point drawn uniformly (seeded) from the pool of
  rows assigned to the selected nodes, which preserves the local price
  distribution at the cost of determinism.

Node selection runs through a KD-tree over the codebook's (lat, lng)
columns, which is what keeps bulk building indexing above the 10k rows/s
mark.
"""

from __future__ import annotations

import datetime as dt
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import ContractViolation, EmptyDataError
from .listings import SWISS_BBOX
from .som import SomConfig, SomModel, default_grid, node_assignments, som_from_dict, som_to_dict, train_som

NODE_MEDIAN = "median"
SAMPLE_DRAW = "sample"

INDEX_FEATURES = ("lat", "lng", "price_per_m2")


@dataclass
class IndexEstimate:
    price_per_m2: float
    strategy: str
    k_used: int
    n_support: int


@dataclass
class BuildingIndexRow:
    building_id: int
    estimate: IndexEstimate
    in_bbox: bool


@dataclass
class PriceIndexModel:
    som: SomModel
    assignments: dict                 # node index -> training row indices
    training_samples: np.ndarray      # (n, 3) columns [lat, lng, price_per_m2]
    k_default: int = 5
    built_at: str = ""
    _tree: Optional[cKDTree] = field(default=None, repr=False, compare=False)
    _node_prices: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    _pool_sizes: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if list(self.som.feature_names) != list(INDEX_FEATURES):
            raise ContractViolation(
                f"index SOM must be trained on {list(INDEX_FEATURES)}")

    def _ensure_caches(self) -> None:
        if self._tree is not None:
            return
        coords = self.som.codebook[:, :2]  # normalized (lat, lng)
        self._tree = cKDTree(coords)
        self._node_prices = self.som.denormalize(self.som.codebook)[:, 2]
        sizes = np.zeros(self.som.n_nodes, dtype=np.int64)
        for node, rows in self.assignments.items():
            sizes[int(node)] = len(rows)
        self._pool_sizes = sizes


def build_index(listings, som_config: Optional[SomConfig] = None,
                k_default: int = 5) -> PriceIndexModel:
    """Train the price index SOM from clean listings."""
    if not listings:
        raise EmptyDataError("no listings to index")
    if len(listings) < 100:
        warnings.warn(f"building a price index from only {len(listings)} listings",
                      stacklevel=2)
    samples = np.array(
        [[c.lat, c.lng, c.gross_rent_chf / c.living_space_m2] for c in listings],
        dtype=np.float64)
    if som_config is None:
        rows, cols = default_grid(len(listings))
        som_config = SomConfig(rows=rows, cols=cols)
    # allow_constant: a uniformly priced (or single-street) snapshot is a
    # legitimate degenerate input for the index, not a config mistake
    som = train_som(samples, som_config, feature_names=INDEX_FEATURES,
                    allow_constant=True)
    assignments = node_assignments(som, samples)
    return PriceIndexModel(
        som=som,
        assignments=assignments,
        training_samples=samples,
        k_default=k_default,
        built_at=dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
    )


def estimate_index(model: PriceIndexModel, lat: float, lng: float,
                   k: Optional[int] = None, strategy: str = NODE_MEDIAN,
                   seed: int = 0) -> IndexEstimate:
    """Price-per-m2 estimate for one coordinate."""
    _check_strategy(strategy)
    k = model.k_default if k is None else int(k)
    if k < 1:
        raise ContractViolation("k must be >= 1")
    if not (SWISS_BBOX["lat_min"] <= lat <= SWISS_BBOX["lat_max"]
            and SWISS_BBOX["lng_min"] <= lng <= SWISS_BBOX["lng_max"]):
        warnings.warn(f"query ({lat}, {lng}) is outside the Swiss bounding box",
                      stacklevel=2)
    return _estimate_one(model, lat, lng, k, strategy, seed)


def _check_strategy(strategy: str) -> None:
    if strategy not in (NODE_MEDIAN, SAMPLE_DRAW):
        raise ContractViolation(f"unknown strategy {strategy!r}")


def _estimate_one(model: PriceIndexModel, lat: float, lng: float, k: int,
                  strategy: str, seed: int) -> IndexEstimate:
    if model.training_samples.shape[0] == 0:
        raise ContractViolation("price index has no training samples")
    model._ensure_caches()
    query = (np.array([lat, lng]) - model.som.norm_mean[:2]) / model.som.norm_std[:2]

    # Widen k by doubling until the selected nodes hold >= 1 training row.
    k_used = min(k, model.som.n_nodes)
    while True:
        _dist, idx = model._tree.query(query, k=k_used)
        idx = np.atleast_1d(idx)
        pool_size = int(model._pool_sizes[idx].sum())
        if pool_size > 0 or k_used >= model.som.n_nodes:
            break
        k_used = min(2 * k_used, model.som.n_nodes)

    if strategy == NODE_MEDIAN:
        price = float(np.median(model._node_prices[idx]))
    else:
        pool = np.concatenate([
            np.asarray(model.assignments.get(int(node), []), dtype=np.int64)
            for node in idx]) if pool_size else np.empty(0, dtype=np.int64)
        rng = np.random.default_rng(seed)
        row = int(pool[rng.integers(0, pool.size)])
        price = float(model.training_samples[row, 2])
    return IndexEstimate(price_per_m2=price, strategy=strategy,
                         k_used=k_used, n_support=max(pool_size, 0))


def index_all_buildings(model: PriceIndexModel, buildings, strategy: str = NODE_MEDIAN,
                        seed: int = 0) -> list:
    """Estimate the index for every building centroid, k = model.k_default.

    Vectorized for the median strategy; each row equals the single-call
    ``estimate_index`` at that centroid with the same seed.
    """
    _check_strategy(strategy)
    if not buildings:
        return []
    if model.training_samples.shape[0] == 0:
        raise ContractViolation("price index has no training samples")
    model._ensure_caches()

    coords = np.array([[b.centroid_lat, b.centroid_lng] for b in buildings])
    in_bbox = ((coords[:, 0] >= SWISS_BBOX["lat_min"]) & (coords[:, 0] <= SWISS_BBOX["lat_max"])
               & (coords[:, 1] >= SWISS_BBOX["lng_min"]) & (coords[:, 1] <= SWISS_BBOX["lng_max"]))
    queries = (coords - model.som.norm_mean[:2]) / model.som.norm_std[:2]

    k = min(model.k_default, model.som.n_nodes)
    _dist, idx = model._tree.query(queries, k=k)
    idx = idx.reshape(len(buildings), k)
    pool_sizes = model._pool_sizes[idx].sum(axis=1)

    out = []
    if strategy == NODE_MEDIAN:
        medians = np.median(model._node_prices[idx], axis=1)
        for i, b in enumerate(buildings):
            if pool_sizes[i] > 0:
                est = IndexEstimate(float(medians[i]), NODE_MEDIAN, k, int(pool_sizes[i]))
            else:  # rare: nodes with no assigned rows, fall back to widening
                est = _estimate_one(model, b.centroid_lat, b.centroid_lng,
                                    model.k_default, strategy, seed)
            out.append(BuildingIndexRow(b.building_id, est, bool(in_bbox[i])))
    else:
        for i, b in enumerate(buildings):
            est = _estimate_one(model, b.centroid_lat, b.centroid_lng,
                                model.k_default, strategy, seed)
            out.append(BuildingIndexRow(b.building_id, est, bool(in_bbox[i])))
    return out


def write_building_index_jsonl(rows, path) -> None:
    """Bulk output: one JSON object per building."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps({
                "building_id": row.building_id,
                "price_per_m2": row.estimate.price_per_m2,
                "strategy": row.estimate.strategy,
                "n_support": row.estimate.n_support,
                "in_bbox": row.in_bbox,
            }))
            fh.write("\n")


# ---------------------------------------------------------------------------
# Serialization

def index_to_dict(model: PriceIndexModel) -> dict:
    return {
        "version": 1,
        "som": som_to_dict(model.som),
        "assignments": {str(node): rows for node, rows in sorted(model.assignments.items())},
        "training_samples": model.training_samples.tolist(),
        "k_default": model.k_default,
        "built_at": model.built_at,
    }


def index_from_dict(obj: dict) -> PriceIndexModel:
    if obj.get("version") != 1:
        raise ValueError(f"unsupported index model version {obj.get('version')!r}")
    return PriceIndexModel(
        som=som_from_dict(obj["som"]),
        assignments={int(node): list(rows) for node, rows in obj["assignments"].items()},
        training_samples=np.asarray(obj["training_samples"], dtype=np.float64),
        k_default=int(obj["k_default"]),
        built_at=obj.get("built_at", ""),
    )


def save_index(model: PriceIndexModel, path) -> None:
    Path(path).write_text(json.dumps(index_to_dict(model)), encoding="utf-8")


def load_index(path) -> PriceIndexModel:
    return index_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
