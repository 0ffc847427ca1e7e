# Walk a raw listing snapshot through the full ingestion pipeline:
# parse -> geocode missing coordinates -> impute missing numerics -> validate.
#
# Run: python demos/01_ingest_and_validate.py

import io
import json

from avm.ingest import Geocoder, impute, parse_listings
from avm.listings import RejectReport, validate

SNAPSHOT = "\n".join(json.dumps(obj) for obj in [
    # complete and valid
    {"listing_id": "A1", "snapshot_date": "2024-06-01", "zip": 8005,
     "property_type": "apartment", "rooms": 3.5, "floor": 2,
     "living_space_m2": 82.0, "year_built": 1992, "gross_rent_chf": 2850.0,
     "lat": 47.391, "lng": 8.515},
    # missing rooms and coordinates, but has an address the stub knows
    {"listing_id": "A2", "snapshot_date": "2024-06-01", "zip": 8001,
     "address": "Bahnhofstrasse 1, 8001 Zurich",
     "property_type": "apartment", "floor": 1,
     "living_space_m2": 61.0, "year_built": 1976, "gross_rent_chf": 2400.0},
    # similar flat, complete: a natural donor for A2's missing room count
    {"listing_id": "A3", "snapshot_date": "2024-06-01", "zip": 8001,
     "property_type": "apartment", "rooms": 2.5, "floor": 1,
     "living_space_m2": 63.0, "year_built": 1980, "gross_rent_chf": 2380.0,
     "lat": 47.37, "lng": 8.54},
    # hopeless: rent obviously wrong, zip outside Switzerland
    {"listing_id": "A4", "snapshot_date": "2024-06-01", "zip": 120,
     "property_type": "studio", "rooms": 1.0, "floor": 0,
     "living_space_m2": 28.0, "year_built": 2001, "gross_rent_chf": 5.0,
     "lat": 47.4, "lng": 8.5},
])

raws, line_errors = parse_listings(io.StringIO(SNAPSHOT), "jsonl")
print(f"parsed {len(raws)} listings, {len(line_errors)} malformed lines")

coder = Geocoder(stub_table={"bahnhofstrasse 1, 8001 zurich": (47.3680, 8.5390)})
for raw in raws:
    if raw.lat is None and raw.address:
        entry = coder.lookup(raw.address)
        raw.lat, raw.lng = entry.lat, entry.lng
        print(f"geocoded {raw.listing_id} via {entry.source}: "
              f"({entry.lat}, {entry.lng})")

raws = impute(raws, k=2, seed=42)
print(f"imputed rooms for A2: {raws[1].rooms} (donated by a similar flat)")

for raw in raws:
    result = validate(raw)
    if isinstance(result, RejectReport):
        print(f"{raw.listing_id} REJECTED: {result.failed_rules}")
    else:
        print(f"{raw.listing_id} clean: {result.rooms} rooms, "
              f"{result.gross_rent_chf:.0f} CHF")
