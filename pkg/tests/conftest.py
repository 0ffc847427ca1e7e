import datetime as dt

import numpy as np
import pytest

from avm.listings import CleanListing


def make_clean(listing_id="L1", snapshot_date=dt.date(2024, 6, 1), zip=8005,
               property_type="apartment", rooms=3.5, floor=2,
               living_space_m2=80.0, year_built=1990, gross_rent_chf=2800.0,
               lat=47.39, lng=8.52, **extra) -> CleanListing:
    return CleanListing(
        listing_id=listing_id, snapshot_date=snapshot_date, zip=zip,
        property_type=property_type, rooms=rooms, floor=floor,
        living_space_m2=living_space_m2, year_built=year_built,
        gross_rent_chf=gross_rent_chf, lat=lat, lng=lng, **extra)


@pytest.fixture
def clean_listing():
    return make_clean()


def random_listings(n, seed=0, zips=(8001, 8005, 8045), base_date=dt.date(2024, 6, 1)):
    """Quick mixed-zip listing set for analytics and store tests."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        rooms = float(rng.choice(np.arange(1.0, 7.0, 0.5)))
        space = float(25 * rooms * rng.uniform(0.8, 1.2))
        out.append(make_clean(
            listing_id=f"r{seed}-{i:05d}",
            snapshot_date=base_date + dt.timedelta(days=int(rng.integers(0, 20))),
            zip=int(rng.choice(zips)),
            property_type=str(rng.choice(["apartment", "duplex", "single_house", "studio"])),
            rooms=rooms,
            floor=int(rng.integers(0, 6)),
            living_space_m2=space,
            year_built=int(rng.integers(1900, 2016)),
            gross_rent_chf=float(rng.uniform(800, 6000)),
            lat=float(47.3 + rng.uniform(-0.1, 0.1)),
            lng=float(8.5 + rng.uniform(-0.1, 0.1)),
        ))
    return out
