# The tenant-side sensitivity queries: where can I find a flat with my
# budget, how much more budget buys how much more choice, and what does the
# matching stock look like.
#
# Run: python demos/05_market_analytics.py

import datetime as dt

from avm.analytics import MarketQuery, budget_sweep, match_histograms, zip_availability
from avm.evaluation import SyntheticConfig, generate_synthetic

listings, _ = generate_synthetic(SyntheticConfig(n=4000, seed=21, noise_sd_chf=150))
period = (dt.date(2024, 6, 1), dt.date(2024, 6, 30))

# 1. availability per zip for: >= 3 rooms, >= 50 m2, <= 3000 CHF/month
query = MarketQuery(min_rooms=3.0, min_living_space_m2=50.0,
                    max_rent_chf=3000.0, period=period)
availability = zip_availability(listings, query)
print("zip   total  match    pct")
for zip_code, stats in sorted(availability.by_zip.items()):
    pct = "NO_DATA" if stats.pct is None else f"{stats.pct:5.1f}%"
    print(f"{zip_code}  {stats.n_total:5d}  {stats.n_match:5d}  {pct}")

# 2. budget sweep in the most active zip: 2+ rooms, 50+ m2
busiest = max(availability.by_zip, key=lambda z: availability.by_zip[z].n_total)
budgets = [1500.0, 2000.0, 2500.0, 3000.0, 4000.0, 6000.0]
curve = budget_sweep(listings, busiest, 2.0, 50.0, budgets, period)
print(f"\nbudget curve for zip {busiest} (n={curve.n_total}):")
for budget, pct in zip(curve.budgets, curve.pct_matched):
    bar = "#" * int(pct / 2)
    print(f"  <= {budget:6.0f} CHF  {pct:5.1f}%  {bar}")

# 3. matched-vs-total histograms, the red-on-white picture as text
hist = match_histograms(listings, busiest, query, n_bins=12)
rooms = hist.dimensions["rooms"]
print(f"\nrooms distribution in zip {busiest} "
      f"(matched {hist.n_match} of {hist.n_total}):")
per_char = max(1, max(rooms.total_counts) // 30)
for lo, hi, total, matched in zip(rooms.bin_edges, rooms.bin_edges[1:],
                                  rooms.total_counts, rooms.matched_counts):
    print(f"  {lo:4.1f}-{hi:4.1f}  total {'#' * (total // per_char):<32s} "
          f"matched {'#' * (matched // per_char)}")
