"""Snapshot-file ingestion: parsing, hot-deck imputation, geocoding.

Snapshot files arrive either as canonical JSON Lines (one listing object per
line) or as CSV with a header row naming the ``RawListing`` fields. In CSV,
``amenities`` is a ``|``-joined flag list and ``distances_m`` a ``|``-joined
``key=value`` list; empty cells mean missing.
"""

from __future__ import annotations

import csv
import io
import json
import re
import string
import threading
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import GeocodeNotFound, GeocodeUnavailable
from .listings import (
    RawListing,
    SWISS_BBOX,
    listing_to_dict,
    raw_listing_from_dict,
)

JSONL = "jsonl"
CSV = "csv"

_CSV_FIELDS = (
    "listing_id", "snapshot_date", "offer_kind", "zip", "address",
    "property_type", "rooms", "floor", "living_space_m2", "floor_space_m2",
    "room_height_m", "volume_m3", "year_built", "year_renovated",
    "net_rent_chf", "expenses_chf", "gross_rent_chf", "available_from",
    "amenities", "distances_m", "description", "lat", "lng",
)


@dataclass
class LineError:
    """A malformed input line: number (1-based) and reason."""

    line_no: int
    reason: str


def parse_listings(stream, format: str = JSONL):
    """Parse a snapshot stream into raw listings.

    ``stream`` may be a text or binary file object, or an iterable of lines.
    Malformed lines become ``LineError`` entries instead of aborting the
    stream. Returns ``(listings, errors)``.
    """
    if format == JSONL:
        return _parse_jsonl(_text_lines(stream))
    if format == CSV:
        return _parse_csv(_text_lines(stream))
    raise ValueError(f"unknown snapshot format {format!r} (use 'jsonl' or 'csv')")


def _text_lines(stream) -> Iterable[str]:
    if isinstance(stream, (str, Path)):
        with open(stream, "r", encoding="utf-8") as fh:
            yield from fh
        return
    if isinstance(stream, bytes):
        stream = io.BytesIO(stream)
    if hasattr(stream, "read") and isinstance(stream.read(0), bytes):
        stream = io.TextIOWrapper(stream, encoding="utf-8")
    yield from stream


def _parse_jsonl(lines):
    listings, errors = [], []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            errors.append(LineError(line_no, f"invalid JSON: {exc.msg}"))
            continue
        try:
            listings.append(raw_listing_from_dict(obj))
        except ValueError as exc:
            errors.append(LineError(line_no, str(exc)))
    return listings, errors


def _parse_csv(lines):
    listings, errors = [], []
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        return listings, errors
    header = [h.strip() for h in header]
    for row in reader:
        line_no = reader.line_num
        if not any(cell.strip() for cell in row):
            continue
        obj = {}
        try:
            for name, cell in zip(header, row):
                cell = cell.strip()
                if not cell:
                    continue
                if name == "amenities":
                    obj[name] = [f for f in cell.split("|") if f]
                elif name == "distances_m":
                    pairs = [p.split("=", 1) for p in cell.split("|") if p]
                    obj[name] = {k: v for k, v in pairs}
                else:
                    obj[name] = cell
            listings.append(raw_listing_from_dict(obj))
        except ValueError as exc:
            errors.append(LineError(line_no, str(exc)))
    return listings, errors


def write_listings_jsonl(listings, path) -> None:
    """Write listings as canonical JSON Lines."""
    with open(path, "w", encoding="utf-8") as fh:
        for listing in listings:
            fh.write(json.dumps(listing_to_dict(listing), sort_keys=True))
            fh.write("\n")


def listings_to_csv_rows(listings):
    """Yield CSV rows (header first) for the given listings."""
    yield list(_CSV_FIELDS)
    for listing in listings:
        obj = listing_to_dict(listing)
        row = []
        for name in _CSV_FIELDS:
            value = obj.get(name)
            if value is None:
                row.append("")
            elif name == "amenities":
                row.append("|".join(value))
            elif name == "distances_m":
                row.append("|".join(f"{k}={v:g}" for k, v in value.items()))
            else:
                row.append(str(value))
        yield row


# ---------------------------------------------------------------------------
# Hot-deck KNN imputation

# Scalar numeric fields eligible as distance dimensions and imputation targets.
IMPUTE_FIELDS = (
    "zip", "rooms", "floor", "living_space_m2", "floor_space_m2",
    "room_height_m", "volume_m3", "year_built", "year_renovated",
    "net_rent_chf", "expenses_chf", "gross_rent_chf", "lat", "lng",
)

_INT_IMPUTE = {"zip", "floor", "year_built", "year_renovated"}


def impute(dataset, k: int, seed: int):
    """Fill missing numeric fields by hot-deck KNN donor draws.

    For every record with a missing field f, the k donors complete in f that
    are nearest by z-scored Euclidean distance over the fields present in
    both records supply the candidate values; one is drawn uniformly with the
    seeded generator. Present values are never altered and donors are always
    taken from the original (pre-imputation) data.
    """
    if not dataset:
        raise ValueError("impute: empty dataset")
    if k < 1:
        raise ValueError("impute: k must be >= 1")

    n = len(dataset)
    F = len(IMPUTE_FIELDS)
    M = np.full((n, F), np.nan)
    for i, rec in enumerate(dataset):
        for j, name in enumerate(IMPUTE_FIELDS):
            value = getattr(rec, name)
            if value is not None:
                M[i, j] = float(value)

    present = ~np.isnan(M)
    mean = np.zeros(F)
    std = np.ones(F)
    for j in range(F):
        col = M[present[:, j], j]
        if col.size:
            mean[j] = col.mean()
            s = col.std()
            std[j] = s if s > 0 else 1.0
    Z = (M - mean) / std  # NaN stays NaN

    rng = np.random.default_rng(seed)
    out = [replace(rec) for rec in dataset]
    row_idx = np.arange(n)

    for i in range(n):
        missing_fields = np.flatnonzero(~present[i])
        if missing_fields.size == 0 or not present[i].any():
            continue  # complete, or no field to measure distance with
        diff_all = Z - Z[i]  # NaN where either side missing
        sq = diff_all * diff_all
        shared = np.sum(~np.isnan(sq), axis=1)
        with np.errstate(invalid="ignore"):
            msd = np.where(shared > 0, np.nansum(sq, axis=1) / np.maximum(shared, 1), np.inf)
        dist = np.sqrt(msd)
        for j in missing_fields:
            donors = row_idx[(present[:, j]) & (row_idx != i) & (shared > 0)]
            if donors.size == 0:
                continue  # nobody can donate this field; validation rejects later
            order = np.lexsort((donors, dist[donors]))
            chosen = donors[order[: min(k, donors.size)]]
            pick = chosen[rng.integers(0, chosen.size)]
            value = M[pick, j]
            name = IMPUTE_FIELDS[j]
            setattr(out[i], name, int(value) if name in _INT_IMPUTE else float(value))
    return out


# ---------------------------------------------------------------------------
# Geocoding

@dataclass
class GeocodeEntry:
    """A resolved address: normalized key, coordinates, and where it came from."""

    address: str
    lat: float
    lng: float
    source: str  # "stub" | "cache" | "external"


_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


def normalize_address(address: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace."""
    collapsed = re.sub(r"\s+", " ", address.translate(_PUNCT_TABLE))
    return collapsed.strip().lower()


class Geocoder:
    """Address resolver backed by a stub table and/or an external client.

    Lookup order: persistent cache, stub table, external client. Results from
    stub or external are written to the cache, so repeat queries report
    ``source="cache"``. Entries outside the Swiss bounding box are rejected.
    Reads are lock-free; cache writes are serialized by one lock.
    """

    def __init__(self, stub_table: Optional[dict] = None,
                 external: Optional[Callable[[str], tuple]] = None,
                 cache_path=None):
        self._stub = {normalize_address(k): (float(v[0]), float(v[1]))
                      for k, v in (stub_table or {}).items()}
        self._external = external
        self._cache_path = Path(cache_path) if cache_path else None
        self._cache: dict = {}
        self._write_lock = threading.Lock()
        if self._cache_path and self._cache_path.exists():
            stored = json.loads(self._cache_path.read_text(encoding="utf-8"))
            self._cache = {k: (float(v["lat"]), float(v["lng"]))
                           for k, v in stored.items()}

    @classmethod
    def from_stub_file(cls, stub_path, cache_path=None) -> "Geocoder":
        """Load a JSON stub file mapping normalized address -> {lat, lng}."""
        table = json.loads(Path(stub_path).read_text(encoding="utf-8"))
        stub = {k: (v["lat"], v["lng"]) for k, v in table.items()}
        return cls(stub_table=stub, cache_path=cache_path)

    def lookup(self, address: str) -> GeocodeEntry:
        key = normalize_address(address)
        if key in self._cache:
            lat, lng = self._cache[key]
            return GeocodeEntry(key, lat, lng, source="cache")
        if key in self._stub:
            lat, lng = self._stub[key]
            self._accept(key, lat, lng)
            return GeocodeEntry(key, lat, lng, source="stub")
        if self._external is not None:
            try:
                lat, lng = self._external(key)
            except Exception as exc:
                raise GeocodeUnavailable(f"external geocoder failed for {key!r}: {exc}") from exc
            self._accept(key, float(lat), float(lng))
            return GeocodeEntry(key, float(lat), float(lng), source="external")
        raise GeocodeNotFound(f"address not found: {key!r}")

    def _accept(self, key: str, lat: float, lng: float) -> None:
        if not (SWISS_BBOX["lat_min"] <= lat <= SWISS_BBOX["lat_max"]
                and SWISS_BBOX["lng_min"] <= lng <= SWISS_BBOX["lng_max"]):
            raise GeocodeNotFound(
                f"geocode for {key!r} is outside the Swiss bounding box")
        with self._write_lock:
            self._cache[key] = (lat, lng)
            if self._cache_path:
                payload = {k: {"lat": v[0], "lng": v[1]}
                           for k, v in sorted(self._cache.items())}
                tmp = self._cache_path.with_suffix(".tmp")
                tmp.write_text(json.dumps(payload, indent=1), encoding="utf-8")
                tmp.replace(self._cache_path)


def geocode(address: str, client: Geocoder) -> GeocodeEntry:
    """Resolve one address through the configured geocoder client."""
    return client.lookup(address)
