"""Market sensitivity queries over a listing snapshot.

All three queries are read-only aggregations: per-zip availability
percentages for a room/space/budget query, cumulative match curves over a
budget sweep, and matched-vs-total histograms. Zips with no listings in the
period report NO_DATA (``None`` in Python, ``null`` on the wire) rather
than zero.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ContractViolation
from .listings import CleanListing


@dataclass
class MarketQuery:
    min_rooms: float
    min_living_space_m2: float
    max_rent_chf: float
    period: tuple  # (start_date, end_date), inclusive
    zips: Optional[frozenset] = None

    def check(self) -> None:
        if min(self.min_rooms, self.min_living_space_m2, self.max_rent_chf) <= 0:
            raise ContractViolation("query thresholds must be positive")
        if self.period[0] > self.period[1]:
            raise ContractViolation("query period start is after its end")


@dataclass
class ZipStats:
    n_total: int
    n_match: int

    @property
    def pct(self) -> Optional[float]:
        if self.n_total == 0:
            return None  # NO_DATA
        return 100.0 * self.n_match / self.n_total


@dataclass
class ZipAvailability:
    by_zip: dict  # zip -> ZipStats


@dataclass
class BudgetCurve:
    zip: int
    budgets: list
    pct_matched: Optional[list]  # None = NO_DATA (no listings in the zip)
    n_total: int = 0


@dataclass
class DimensionHistogram:
    bin_edges: list
    total_counts: list
    matched_counts: list


@dataclass
class MatchHistograms:
    zip: int
    n_total: int
    n_match: int
    dimensions: dict = field(default_factory=dict)  # name -> DimensionHistogram


HISTOGRAM_DIMENSIONS = ("rooms", "living_space_m2", "gross_rent_chf")


def match(listing: CleanListing, q: MarketQuery) -> bool:
    """Room and space thresholds are inclusive minima, the budget an
    inclusive maximum; the period is a closed date interval."""
    start, end = q.period
    return (listing.rooms >= q.min_rooms
            and listing.living_space_m2 >= q.min_living_space_m2
            and listing.gross_rent_chf <= q.max_rent_chf
            and start <= listing.snapshot_date <= end
            and (not q.zips or listing.zip in q.zips))


def _in_period(listing: CleanListing, period) -> bool:
    return period[0] <= listing.snapshot_date <= period[1]


def zip_availability(listings: Sequence[CleanListing], q: MarketQuery) -> ZipAvailability:
    """Counts and match percentage per zip over the query period.

    Explicitly requested zips with no listings in the period appear with
    ``n_total == 0`` and ``pct is None`` (the NO_DATA marker); without a zip
    filter, only zips present in the data appear.
    """
    q.check()
    by_zip: dict = {z: ZipStats(0, 0) for z in (q.zips or ())}
    for listing in listings:
        if not _in_period(listing, q.period):
            continue
        if q.zips and listing.zip not in q.zips:
            continue
        stats = by_zip.setdefault(listing.zip, ZipStats(0, 0))
        stats.n_total += 1
        if match(listing, q):
            stats.n_match += 1
    return ZipAvailability(by_zip=by_zip)


def budget_sweep(listings: Sequence[CleanListing], zip_code: int,
                 min_rooms: float, min_space: float,
                 budgets: Sequence[float], period) -> BudgetCurve:
    """Cumulative match percentages over ascending budgets for one zip.

    The denominator is every listing of the zip in the period, fixed across
    budgets, so a curve saturates below 100% when the room or space
    thresholds alone exclude listings.
    """
    budgets = list(budgets)
    if not budgets:
        raise ContractViolation("budget list is empty")
    if any(b2 < b1 for b1, b2 in zip(budgets, budgets[1:])):
        raise ContractViolation("budgets must be ascending")

    pool = [l for l in listings if l.zip == zip_code and _in_period(l, period)]
    if not pool:
        return BudgetCurve(zip=zip_code, budgets=budgets, pct_matched=None)

    n_total = len(pool)
    eligible = np.array([l.gross_rent_chf for l in pool
                         if l.rooms >= min_rooms and l.living_space_m2 >= min_space])
    pct = [100.0 * float((eligible <= b).sum()) / n_total if eligible.size else 0.0
           for b in budgets]
    return BudgetCurve(zip=zip_code, budgets=budgets, pct_matched=pct, n_total=n_total)


def match_histograms(listings: Sequence[CleanListing], zip_code: int,
                     q: MarketQuery, n_bins: int = 20) -> MatchHistograms:
    """Matched-on-total histograms for rooms, living space, and rent.

    Bin edges are equal-width over the TOTAL population's [min, max] per
    dimension; matched counts reuse those edges, so matched <= total holds
    bin-wise by construction.
    """
    q.check()
    pool = [l for l in listings if l.zip == zip_code and _in_period(l, q.period)]
    if not pool:
        return MatchHistograms(zip=zip_code, n_total=0, n_match=0)

    matched = [l for l in pool if match(l, q)]
    out = MatchHistograms(zip=zip_code, n_total=len(pool), n_match=len(matched))
    for name in HISTOGRAM_DIMENSIONS:
        total_values = np.array([getattr(l, name) for l in pool], dtype=np.float64)
        match_values = np.array([getattr(l, name) for l in matched], dtype=np.float64)
        lo, hi = float(total_values.min()), float(total_values.max())
        if lo == hi:  # single-valued dimension still gets a usable bin
            lo, hi = lo - 0.5, hi + 0.5
        edges = np.linspace(lo, hi, n_bins + 1)
        total_counts, _ = np.histogram(total_values, bins=edges)
        match_counts, _ = np.histogram(match_values, bins=edges)
        out.dimensions[name] = DimensionHistogram(
            bin_edges=edges.tolist(),
            total_counts=total_counts.tolist(),
            matched_counts=match_counts.tolist(),
        )
    return out


def parse_period(start: str, end: str) -> tuple:
    return (dt.date.fromisoformat(start), dt.date.fromisoformat(end))
