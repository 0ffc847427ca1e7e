# Extract building centroids from an OSM XML fragment.
#
# Run: python demos/02_osm_buildings.py

import io

from avm.osmx import parse_osm_buildings

EXTRACT = b"""<?xml version='1.0' encoding='UTF-8'?>
<osm version='0.6'>
  <node id='1' lat='47.3770' lon='8.5400'/>
  <node id='2' lat='47.3770' lon='8.5412'/>
  <node id='3' lat='47.3779' lon='8.5412'/>
  <node id='4' lat='47.3779' lon='8.5400'/>
  <node id='5' lat='47.3781' lon='8.5420'/>
  <node id='6' lat='47.3781' lon='8.5428'/>
  <node id='7' lat='47.3786' lon='8.5428'/>
  <way id='100'>
    <nd ref='1'/><nd ref='2'/><nd ref='3'/><nd ref='4'/><nd ref='1'/>
    <tag k='building' v='yes'/>
  </way>
  <way id='101'>
    <nd ref='5'/><nd ref='6'/><nd ref='7'/><nd ref='5'/>
    <tag k='building' v='residential'/>
  </way>
  <way id='102'>
    <nd ref='1'/><nd ref='2'/><nd ref='999'/><nd ref='1'/>
    <tag k='building' v='yes'/>
  </way>
  <way id='103'>
    <nd ref='1'/><nd ref='2'/><nd ref='3'/><nd ref='4'/><nd ref='1'/>
    <tag k='highway' v='footway'/>
  </way>
</osm>
"""

buildings, stats = parse_osm_buildings(io.BytesIO(EXTRACT))

print(f"nodes={stats.nodes} ways={stats.ways}")
print(f"buildings={stats.buildings} dangling={stats.dangling} "
      f"degenerate={stats.degenerate} relations_skipped={stats.relations_skipped}")
for b in buildings:
    print(f"  way {b.building_id}: centroid ({b.centroid_lat:.6f}, "
          f"{b.centroid_lng:.6f}), {b.n_nodes} corners")

# way 102 references node 999 which does not exist: counted, not fatal.
# way 103 is a footpath, not a building.
