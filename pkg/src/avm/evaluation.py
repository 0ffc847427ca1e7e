"""Holdout evaluation under the absolute relative error metric.

ARE = |actual - predicted| / actual. Reports carry the median ARE (in
percent) and the share of test rows under the three error thresholds with
their asymmetric boundary operators: <= 1%, < 5%, < 15%.

The synthetic listing generator provides a desk-scale dataset with a known
ground-truth rent surface, used as the oracle for benchmark-shape tests.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, InsufficientDataError
from .listings import CleanListing, PROPERTY_TYPES, encode_many
from .regress import ALGORITHMS


@dataclass
class EvalReport:
    algo: str
    n_test: int
    median_are_pct: float
    pct_le_1: float
    pct_lt_5: float
    pct_lt_15: float
    seed: int
    error: Optional[str] = None  # set when the algorithm failed on this run


def split(dataset: Sequence, train_fraction: float = 0.8, seed: int = 0) -> tuple:
    """Seeded uniform shuffle, then prefix split into (train, test)."""
    n = len(dataset)
    if n < 5:
        raise InsufficientDataError(f"need at least 5 rows to split, got {n}")
    order = np.random.default_rng(seed).permutation(n)
    n_train = int(n * train_fraction)
    pick = lambda idx: [dataset[i] for i in idx]
    if isinstance(dataset, np.ndarray):
        pick = lambda idx: dataset[idx]
    return pick(order[:n_train]), pick(order[n_train:])


def compute_are(actual: float, predicted: float) -> float:
    """|A - P| / A. The actual price must be positive."""
    if actual <= 0:
        raise DomainError(f"actual price must be positive, got {actual}")
    return abs(actual - predicted) / actual


def evaluate(predict_fn: Callable, X_test, y_test, algo: str = "",
             seed: int = 0) -> EvalReport:
    """Score a predictor on a test set.

    ``predict_fn`` maps an (n, d) matrix to n predictions. Median of an even
    count is the mean of the two central values (numpy convention).
    """
    X_test = np.asarray(X_test, dtype=np.float64)
    y_test = np.asarray(y_test, dtype=np.float64)
    if y_test.size == 0:
        raise InsufficientDataError("empty test set")
    if np.any(y_test <= 0):
        raise DomainError("actual prices must be positive")
    preds = np.asarray(predict_fn(X_test), dtype=np.float64)
    ares = np.abs(y_test - preds) / y_test
    return EvalReport(
        algo=algo,
        n_test=int(y_test.size),
        median_are_pct=float(np.median(ares) * 100.0),
        pct_le_1=float((ares <= 0.01).mean() * 100.0),
        pct_lt_5=float((ares < 0.05).mean() * 100.0),
        pct_lt_15=float((ares < 0.15).mean() * 100.0),
        seed=seed,
    )


def benchmark_all(X, y, algos: Sequence[str], seeds: Sequence[int],
                  train_fraction: float = 0.8) -> list:
    """Repeated-holdout benchmark: one report per (seed, algorithm).

    A failing algorithm yields a report carrying its error message; the run
    continues. Reports come back in (seed, algo) order.
    """
    if not seeds:
        raise InsufficientDataError("need at least one seed")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    reports = []
    for seed in seeds:
        idx_train, idx_test = split(np.arange(len(y)), train_fraction, seed)
        X_tr, y_tr = X[idx_train], y[idx_train]
        X_te, y_te = X[idx_test], y[idx_test]
        for name in algos:
            spec = ALGORITHMS[name]
            try:
                model = spec.fit(X_tr, y_tr, seed)
                report = evaluate(lambda Q: spec.predict(model, Q),
                                  X_te, y_te, algo=name, seed=seed)
            except Exception as exc:
                report = EvalReport(algo=name, n_test=len(y_te),
                                    median_are_pct=math.nan, pct_le_1=math.nan,
                                    pct_lt_5=math.nan, pct_lt_15=math.nan,
                                    seed=seed, error=str(exc))
            reports.append(report)
    return reports


_ALGO_LABELS = {
    "rf": "Random Forest",
    "knn": "KNN",
    "bridge": "Bayesian Regularized Regression",
    "ols": "Linear Regression",
    "lp1": "Local Regression P-Order=1",
    "lp2": "Local Regression P-Order=2",
    "lp3": "Local Regression P-Order=3",
}


def render_report_text(reports: Sequence[EvalReport]) -> str:
    """Fixed-width table: algorithm rows, median and threshold columns."""
    lines = [f"{'Algorithm':<34} {'Seed':>5} {'Median':>8} {'<=1%':>7} {'<5%':>7} {'<15%':>7}"]
    for r in reports:
        label = _ALGO_LABELS.get(r.algo, r.algo)
        if r.error:
            lines.append(f"{label:<34} {r.seed:>5} FAILED: {r.error}")
        else:
            lines.append(
                f"{label:<34} {r.seed:>5} {r.median_are_pct:>8.2f}"
                f" {r.pct_le_1:>7.2f} {r.pct_lt_5:>7.2f} {r.pct_lt_15:>7.2f}")
    return "\n".join(lines) + "\n"


def render_report_csv(reports: Sequence[EvalReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["algo", "seed", "n_test", "median_are_pct",
                     "pct_le_1", "pct_lt_5", "pct_lt_15", "error"])
    for r in reports:
        writer.writerow([r.algo, r.seed, r.n_test,
                         f"{r.median_are_pct:.4f}", f"{r.pct_le_1:.4f}",
                         f"{r.pct_lt_5:.4f}", f"{r.pct_lt_15:.4f}",
                         r.error or ""])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Synthetic oracle dataset

@dataclass
class SyntheticConfig:
    n: int
    seed: int = 0
    noise_sd_chf: float = 0.0
    city_centers: list = field(default_factory=lambda: [
        (47.38, 8.54, 44.0),   # expensive core
        (47.30, 8.40, 20.0),   # cheap periphery
        (47.47, 8.66, 32.0),   # mid-priced suburb
    ])
    snapshot_date: dt.date = dt.date(2024, 6, 1)

    def check(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.noise_sd_chf < 0:
            raise ValueError("noise_sd_chf must be >= 0")


_KM_PER_DEG_LAT = 111.32
_ROOM_CHOICES = np.arange(1.0, 7.0, 0.5)  # 1.0 .. 6.5
_ZIP_BASES = (8000, 3000, 1200, 6900, 4000, 7000)
_PTYPE_WEIGHTS = (0.75, 0.05, 0.10, 0.10)  # apartments dominate the rental market


def rent_formula(living_space_m2: float, year_built: float, km_to_center: float,
                 base_chf_per_m2: float) -> float:
    """Noise-free monthly rent of the synthetic market.

    space * base price * proximity premium * age factor, with the premium
    decaying over ~2 km and newer buildings renting above older ones.
    """
    proximity = 1.0 + 0.5 * math.exp(-km_to_center / 2.0)
    age = 1.0 + 0.1 * (year_built - 1950.0) / 65.0
    return living_space_m2 * base_chf_per_m2 * proximity * age


def _km_to(lat, lng, clat, clng):
    dlat = (lat - clat) * _KM_PER_DEG_LAT
    dlng = (lng - clng) * _KM_PER_DEG_LAT * math.cos(math.radians(clat))
    return math.hypot(dlat, dlng)


def generate_synthetic(config: SyntheticConfig) -> tuple:
    """Draw a seeded synthetic listing set.

    Returns ``(listings, true_rents)`` where ``true_rents[i]`` is the
    noise-free rent of ``listings[i]``; with ``noise_sd_chf == 0`` the listing
    rents equal the published truth exactly.
    """
    config.check()
    rng = np.random.default_rng(config.seed)
    centers = config.city_centers
    listings = []
    true_rents = np.empty(config.n)

    center_idx = rng.integers(0, len(centers), config.n)
    rooms_all = rng.choice(_ROOM_CHOICES, config.n)
    space_factor = rng.uniform(0.8, 1.2, config.n)
    lat_off = rng.normal(0.0, 0.05, config.n)
    lng_off = rng.normal(0.0, 0.05, config.n)
    years = rng.integers(1900, 2016, config.n)
    floors = rng.integers(0, 6, config.n)
    ptype_idx = rng.choice(len(PROPERTY_TYPES), size=config.n, p=_PTYPE_WEIGHTS)
    zip_jitter = rng.integers(0, 10, config.n)
    noise = rng.normal(0.0, config.noise_sd_chf, config.n) if config.noise_sd_chf > 0 \
        else np.zeros(config.n)

    for i in range(config.n):
        clat, clng, _base = centers[center_idx[i]]
        lat = clat + lat_off[i]
        lng = clng + lng_off[i]
        space = 25.0 * rooms_all[i] * space_factor[i]
        # price field keyed to the NEAREST center, so borders stay consistent
        dists = [_km_to(lat, lng, c[0], c[1]) for c in centers]
        nearest = int(np.argmin(dists))
        truth = rent_formula(space, float(years[i]), dists[nearest],
                             centers[nearest][2])
        rent = max(truth + noise[i], 105.0)  # keep inside the validity bounds
        true_rents[i] = truth
        listings.append(CleanListing(
            listing_id=f"syn-{config.seed}-{i:06d}",
            snapshot_date=config.snapshot_date,
            zip=int(_ZIP_BASES[center_idx[i] % len(_ZIP_BASES)] + zip_jitter[i]),
            property_type=PROPERTY_TYPES[ptype_idx[i]],
            rooms=float(rooms_all[i]),
            floor=int(floors[i]),
            living_space_m2=float(space),
            year_built=int(years[i]),
            gross_rent_chf=float(rent),
            lat=float(lat),
            lng=float(lng),
        ))
    return listings, true_rents


def benchmark_listings(listings, algos, seeds, train_fraction: float = 0.8) -> list:
    """Encode clean listings and run the repeated-holdout benchmark."""
    X, y = encode_many(listings)
    return benchmark_all(X, y, algos, seeds, train_fraction)
