# Build the per-m2 rental price index: train a SOM on (lat, lng, price/m2)
# of the listing stream, then query arbitrary coordinates with both
# estimation strategies.
#
# Run: python demos/03_price_index_som.py

import numpy as np

from avm.evaluation import SyntheticConfig, generate_synthetic
from avm.osmx import Building
from avm.som import SomConfig, component_planes
from avm.spatial_index import (
    NODE_MEDIAN,
    SAMPLE_DRAW,
    build_index,
    estimate_index,
    index_all_buildings,
)

listings, _ = generate_synthetic(SyntheticConfig(n=3000, seed=7, noise_sd_chf=120))
print(f"{len(listings)} listings, "
      f"median price {np.median([l.price_per_m2 for l in listings]):.1f} CHF/m2")

model = build_index(listings, SomConfig(rows=12, cols=12, epochs=15, seed=1))
print(f"SOM {model.som.config.rows}x{model.som.config.cols}, "
      f"quantization error {model.som.qe_initial:.3f} -> {model.som.qe_final:.3f}")

core, periphery = (47.38, 8.54), (47.30, 8.40)
for name, (lat, lng) in {"core": core, "periphery": periphery}.items():
    med = estimate_index(model, lat, lng, k=5, strategy=NODE_MEDIAN)
    smp = estimate_index(model, lat, lng, k=5, strategy=SAMPLE_DRAW, seed=3)
    print(f"{name:10s} median={med.price_per_m2:6.1f} CHF/m2 "
          f"(support {med.n_support})  sample-draw={smp.price_per_m2:6.1f}")

# bulk: price every building of a small synthetic town
rng = np.random.default_rng(0)
buildings = [Building(i, float(47.36 + rng.uniform(0, 0.04)),
                      float(8.52 + rng.uniform(0, 0.04)), [], 0)
             for i in range(20_000)]
rows = index_all_buildings(model, buildings, strategy=NODE_MEDIAN)
prices = [r.estimate.price_per_m2 for r in rows]
print(f"indexed {len(rows)} buildings: "
      f"min {min(prices):.1f}, median {np.median(prices):.1f}, "
      f"max {max(prices):.1f} CHF/m2")

# the component planes behind the index (the price plane is the map itself)
planes = component_planes(model.som)
price_plane = planes.denormalized[planes.feature_names.index("price_per_m2")]
print("price plane row medians (south to north):",
      np.round(np.median(price_plane, axis=1), 1).tolist())
