"""Listing records, validation rules, and the regression feature encoding.

A listing moves through three representations:

* ``RawListing``   - whatever a snapshot file contained, most fields optional
* ``CleanListing`` - required fields present and inside sanity bounds
* ``FeatureVector``- the fixed 11-value numeric input of the valuation models

The canonical on-disk form is JSON Lines, one object per line, snake_case
field names identical to the ``RawListing`` attributes, ISO-8601 dates, and
missing values encoded as absent keys.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field, fields as dc_fields
from typing import Optional

import numpy as np

# Supported offer kinds and property types (canonical snake_case strings).
OFFER_KINDS = ("rent", "sale")
PROPERTY_TYPES = ("apartment", "duplex", "single_house", "studio")

AMENITY_FLAGS = (
    "view", "balcony", "fireplace", "cable_tv", "isdn", "children_welcome",
    "parking", "garage", "wheelchair", "pets", "elevator", "group_living",
    "new_building", "old_building", "pool",
)

DISTANCE_KEYS = (
    "public_transport", "shopping", "kindergarten", "primary_school",
    "secondary_school", "motorway",
)

# One-hot encoding order of the property type, fixed and shared by every
# encoder and model in the package.
FEATURE_NAMES = (
    "is_apartment", "is_duplex", "is_single_house", "is_studio",
    "rooms", "floor", "living_space_m2", "year_built", "zip", "lng", "lat",
)
N_FEATURES = len(FEATURE_NAMES)

SWISS_BBOX = {"lat_min": 45.7, "lat_max": 48.0, "lng_min": 5.8, "lng_max": 10.7}


@dataclass
class RawListing:
    """One advertisement record as parsed from a snapshot file."""

    listing_id: str
    snapshot_date: Optional[dt.date] = None
    offer_kind: str = "rent"
    zip: Optional[int] = None
    address: Optional[str] = None
    property_type: Optional[str] = None
    rooms: Optional[float] = None
    floor: Optional[int] = None
    living_space_m2: Optional[float] = None
    floor_space_m2: Optional[float] = None
    room_height_m: Optional[float] = None
    volume_m3: Optional[float] = None
    year_built: Optional[int] = None
    year_renovated: Optional[int] = None
    net_rent_chf: Optional[float] = None
    expenses_chf: Optional[float] = None
    gross_rent_chf: Optional[float] = None
    available_from: Optional[dt.date] = None
    amenities: set = field(default_factory=set)
    distances_m: dict = field(default_factory=dict)
    description: Optional[str] = None
    lat: Optional[float] = None
    lng: Optional[float] = None


@dataclass
class CleanListing:
    """A validated listing; the required fields are mandatory here."""

    listing_id: str
    snapshot_date: dt.date
    zip: int
    property_type: str
    rooms: float
    floor: int
    living_space_m2: float
    year_built: int
    gross_rent_chf: float
    lat: float
    lng: float
    offer_kind: str = "rent"
    address: Optional[str] = None
    floor_space_m2: Optional[float] = None
    room_height_m: Optional[float] = None
    volume_m3: Optional[float] = None
    year_renovated: Optional[int] = None
    net_rent_chf: Optional[float] = None
    expenses_chf: Optional[float] = None
    available_from: Optional[dt.date] = None
    amenities: set = field(default_factory=set)
    distances_m: dict = field(default_factory=dict)
    description: Optional[str] = None

    @property
    def price_per_m2(self) -> float:
        return self.gross_rent_chf / self.living_space_m2


@dataclass
class FeatureVector:
    """Fixed-order model input (see ``FEATURE_NAMES``) plus the target."""

    values: np.ndarray
    target_rent_chf: float


@dataclass
class RejectReport:
    """Validation outcome for a listing that failed one or more rules."""

    listing_id: str
    failed_rules: list


@dataclass
class ValidationBounds:
    """Sanity ranges applied by ``validate``; override per deployment."""

    zip_min: int = 1000
    zip_max: int = 9699
    rooms_min: float = 0.0      # exclusive
    rooms_max: float = 30.0
    space_min: float = 5.0      # exclusive
    space_max: float = 2000.0
    rent_min: float = 100.0     # exclusive
    rent_max: float = 100000.0
    year_min: int = 1200
    floor_min: int = -3
    floor_max: int = 50
    lat_min: float = SWISS_BBOX["lat_min"]
    lat_max: float = SWISS_BBOX["lat_max"]
    lng_min: float = SWISS_BBOX["lng_min"]
    lng_max: float = SWISS_BBOX["lng_max"]


DEFAULT_BOUNDS = ValidationBounds()

_REQUIRED = (
    "listing_id", "snapshot_date", "zip", "property_type", "rooms", "floor",
    "living_space_m2", "year_built", "gross_rent_chf", "lat", "lng",
)


def validate(raw: RawListing, bounds: ValidationBounds = DEFAULT_BOUNDS):
    """Check a raw listing against the required-field and range rules.

    Returns a ``CleanListing`` when every rule passes, otherwise a
    ``RejectReport`` listing every failed rule (not only the first).
    Rejection is a value, never an exception.
    """
    rules = []
    for name in _REQUIRED:
        value = getattr(raw, name)
        if value is None or (name == "listing_id" and value == ""):
            rules.append(f"{name}: missing")

    b = bounds
    if raw.property_type is not None and raw.property_type not in PROPERTY_TYPES:
        rules.append(f"property_type: unsupported value {raw.property_type!r}")
    if raw.zip is not None and not (b.zip_min <= raw.zip <= b.zip_max):
        rules.append(f"zip: outside [{b.zip_min}, {b.zip_max}]")
    if raw.rooms is not None and not (b.rooms_min < raw.rooms <= b.rooms_max):
        rules.append(f"rooms: outside ({b.rooms_min}, {b.rooms_max}]")
    if raw.living_space_m2 is not None and not (b.space_min < raw.living_space_m2 <= b.space_max):
        rules.append(f"living_space_m2: outside ({b.space_min}, {b.space_max}]")
    if raw.gross_rent_chf is not None and not (b.rent_min < raw.gross_rent_chf <= b.rent_max):
        rules.append(f"gross_rent_chf: outside ({b.rent_min}, {b.rent_max}]")
    if raw.year_built is not None and raw.snapshot_date is not None:
        if not (b.year_min <= raw.year_built <= raw.snapshot_date.year):
            rules.append(f"year_built: outside [{b.year_min}, snapshot year]")
    if raw.floor is not None and not (b.floor_min <= raw.floor <= b.floor_max):
        rules.append(f"floor: outside [{b.floor_min}, {b.floor_max}]")
    if raw.lat is not None and not (b.lat_min <= raw.lat <= b.lat_max):
        rules.append(f"lat: outside [{b.lat_min}, {b.lat_max}]")
    if raw.lng is not None and not (b.lng_min <= raw.lng <= b.lng_max):
        rules.append(f"lng: outside [{b.lng_min}, {b.lng_max}]")

    if rules:
        return RejectReport(listing_id=raw.listing_id, failed_rules=rules)

    return CleanListing(
        listing_id=raw.listing_id,
        snapshot_date=raw.snapshot_date,
        zip=int(raw.zip),
        property_type=raw.property_type,
        rooms=float(raw.rooms),
        floor=int(raw.floor),
        living_space_m2=float(raw.living_space_m2),
        year_built=int(raw.year_built),
        gross_rent_chf=float(raw.gross_rent_chf),
        lat=float(raw.lat),
        lng=float(raw.lng),
        offer_kind=raw.offer_kind,
        address=raw.address,
        floor_space_m2=raw.floor_space_m2,
        room_height_m=raw.room_height_m,
        volume_m3=raw.volume_m3,
        year_renovated=raw.year_renovated,
        net_rent_chf=raw.net_rent_chf,
        expenses_chf=raw.expenses_chf,
        available_from=raw.available_from,
        amenities=set(raw.amenities),
        distances_m=dict(raw.distances_m),
        description=raw.description,
    )


def encode_features(c: CleanListing) -> FeatureVector:
    """Map a clean listing onto the fixed 11-value feature vector."""
    onehot = [1.0 if c.property_type == p else 0.0 for p in PROPERTY_TYPES]
    values = np.array(
        onehot + [c.rooms, float(c.floor), c.living_space_m2,
                  float(c.year_built), float(c.zip), c.lng, c.lat],
        dtype=np.float64,
    )
    return FeatureVector(values=values, target_rent_chf=c.gross_rent_chf)


def encode_many(listings) -> tuple:
    """Encode a sequence of clean listings into an (X, y) array pair."""
    X = np.empty((len(listings), N_FEATURES), dtype=np.float64)
    y = np.empty(len(listings), dtype=np.float64)
    for i, c in enumerate(listings):
        fv = encode_features(c)
        X[i] = fv.values
        y[i] = fv.target_rent_chf
    return X, y


# ---------------------------------------------------------------------------
# Canonical JSON (de)serialization

_DATE_FIELDS = ("snapshot_date", "available_from")
_FLOAT_FIELDS = (
    "rooms", "living_space_m2", "floor_space_m2", "room_height_m", "volume_m3",
    "net_rent_chf", "expenses_chf", "gross_rent_chf", "lat", "lng",
)
_INT_FIELDS = ("zip", "floor", "year_built", "year_renovated")


def listing_to_dict(listing) -> dict:
    """Serialize a Raw or Clean listing to the canonical JSON object."""
    out = {}
    for f in dc_fields(listing):
        value = getattr(listing, f.name)
        if value is None:
            continue
        if f.name in _DATE_FIELDS:
            out[f.name] = value.isoformat()
        elif f.name == "amenities":
            if value:
                out[f.name] = sorted(value)
        elif f.name == "distances_m":
            if value:
                out[f.name] = {k: float(v) for k, v in sorted(value.items())}
        else:
            out[f.name] = value
    return out


def raw_listing_from_dict(obj: dict) -> RawListing:
    """Build a RawListing from a parsed JSON object, coercing field types.

    Raises ValueError on records that cannot form a RawListing at all
    (missing id, non-finite numerics, negative rents or distances).
    """
    if not isinstance(obj, dict):
        raise ValueError("record is not an object")
    listing_id = obj.get("listing_id")
    if not listing_id or not isinstance(listing_id, str):
        raise ValueError("listing_id: missing or empty")

    kwargs = {"listing_id": listing_id}
    if "offer_kind" in obj:
        kind = str(obj["offer_kind"]).lower()
        if kind not in OFFER_KINDS:
            raise ValueError(f"offer_kind: unknown value {obj['offer_kind']!r}")
        kwargs["offer_kind"] = kind
    for name in _DATE_FIELDS:
        if obj.get(name) is not None:
            kwargs[name] = _parse_date(name, obj[name])
    for name in _FLOAT_FIELDS:
        if obj.get(name) is not None:
            kwargs[name] = _parse_float(name, obj[name])
    for name in _INT_FIELDS:
        if obj.get(name) is not None:
            kwargs[name] = _parse_int(name, obj[name])
    for name in ("address", "property_type", "description"):
        if obj.get(name) is not None:
            kwargs[name] = str(obj[name])

    if obj.get("amenities") is not None:
        flags = obj["amenities"]
        if not isinstance(flags, (list, set, tuple)):
            raise ValueError("amenities: expected a list of flags")
        kwargs["amenities"] = {str(f) for f in flags}
    if obj.get("distances_m") is not None:
        dist = obj["distances_m"]
        if not isinstance(dist, dict):
            raise ValueError("distances_m: expected an object")
        kwargs["distances_m"] = {
            str(k): _parse_float(f"distances_m.{k}", v) for k, v in dist.items()
        }

    raw = RawListing(**kwargs)
    _check_raw_invariants(raw)
    return raw


def clean_listing_from_dict(obj: dict) -> CleanListing:
    """Parse a canonical JSON object that must satisfy CleanListing."""
    result = validate(raw_listing_from_dict(obj))
    if isinstance(result, RejectReport):
        raise ValueError(
            f"not a clean listing: {'; '.join(result.failed_rules)}")
    return result


_NONNEGATIVE = (
    "rooms", "living_space_m2", "floor_space_m2", "room_height_m",
    "volume_m3", "net_rent_chf", "expenses_chf", "gross_rent_chf",
)


def _check_raw_invariants(raw: RawListing) -> None:
    for name in _FLOAT_FIELDS:
        value = getattr(raw, name)
        if value is not None and not math.isfinite(value):
            raise ValueError(f"{name}: not finite")
    for name in _NONNEGATIVE:
        value = getattr(raw, name)
        if value is not None and value < 0:
            raise ValueError(f"{name}: negative")
    for key, value in raw.distances_m.items():
        if not math.isfinite(value) or value < 0:
            raise ValueError(f"distances_m.{key}: negative or not finite")


def _parse_date(name: str, value) -> dt.date:
    if isinstance(value, dt.date):
        return value
    try:
        return dt.date.fromisoformat(str(value))
    except ValueError as exc:
        raise ValueError(f"{name}: bad date {value!r}") from exc


def _parse_float(name: str, value) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{name}: not a number ({value!r})") from exc
    if not math.isfinite(out):
        raise ValueError(f"{name}: not finite")
    return out


def _parse_int(name: str, value) -> int:
    try:
        fval = float(value)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{name}: not an integer ({value!r})") from exc
    if not float(fval).is_integer():
        raise ValueError(f"{name}: not an integer ({value!r})")
    return int(fval)
