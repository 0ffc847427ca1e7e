import io

import pytest

from avm.errors import ContractViolation, OsmXmlError
from avm.osmx import centroid, parse_osm_buildings, read_buildings_jsonl, write_buildings_jsonl

SQUARE = [(47.0, 8.0), (47.0, 8.001), (47.001, 8.001), (47.001, 8.0), (47.0, 8.0)]


def osm_xml(nodes, ways, relations=()) -> io.BytesIO:
    parts = ["<?xml version='1.0' encoding='UTF-8'?>", "<osm version='0.6'>"]
    for nid, lat, lon in nodes:
        parts.append(f"<node id='{nid}' lat='{lat}' lon='{lon}'/>")
    for wid, refs, tags in ways:
        parts.append(f"<way id='{wid}'>")
        parts.extend(f"<nd ref='{r}'/>" for r in refs)
        parts.extend(f"<tag k='{k}' v='{v}'/>" for k, v in tags)
        parts.append("</way>")
    for rid, tags in relations:
        parts.append(f"<relation id='{rid}'>")
        parts.extend(f"<tag k='{k}' v='{v}'/>" for k, v in tags)
        parts.append("</relation>")
    parts.append("</osm>")
    return io.BytesIO("".join(parts).encode())


SQUARE_NODES = [(1, 47.0, 8.0), (2, 47.0, 8.001), (3, 47.001, 8.001), (4, 47.001, 8.0)]


class TestParser:
    def test_square_building(self):
        stream = osm_xml(SQUARE_NODES, [(100, [1, 2, 3, 4, 1], [("building", "yes")])])
        buildings, stats = parse_osm_buildings(stream)
        assert stats.buildings == 1
        (b,) = buildings
        assert b.building_id == 100
        assert b.n_nodes == 4
        assert b.centroid_lat == pytest.approx(47.0005, abs=1e-9)
        assert b.centroid_lng == pytest.approx(8.0005, abs=1e-9)

    def test_building_no_is_skipped(self):
        stream = osm_xml(SQUARE_NODES, [(100, [1, 2, 3, 4, 1], [("building", "no")])])
        buildings, stats = parse_osm_buildings(stream)
        assert buildings == [] and stats.buildings == 0

    def test_any_other_building_value_counts(self):
        stream = osm_xml(SQUARE_NODES, [(100, [1, 2, 3, 4, 1], [("building", "residential")])])
        buildings, _stats = parse_osm_buildings(stream)
        assert len(buildings) == 1

    def test_dangling_ref_skipped_and_counted(self):
        stream = osm_xml(SQUARE_NODES, [(100, [1, 2, 999, 4, 1], [("building", "yes")])])
        buildings, stats = parse_osm_buildings(stream)
        assert buildings == [] and stats.dangling == 1

    def test_unclosed_ring_is_closed_implicitly(self):
        stream = osm_xml(SQUARE_NODES, [(100, [1, 2, 3, 4], [("building", "yes")])])
        (b,), _ = parse_osm_buildings(stream)
        assert b.footprint[0] == b.footprint[-1]

    def test_building_relations_counted_not_parsed(self):
        stream = osm_xml(SQUARE_NODES,
                         [(100, [1, 2, 3, 4, 1], [("building", "yes")])],
                         relations=[(7, [("building", "yes"), ("type", "multipolygon")])])
        buildings, stats = parse_osm_buildings(stream)
        assert len(buildings) == 1
        assert stats.relations_skipped == 1

    def test_output_plus_skips_equals_building_tagged_ways(self):
        ways = [
            (100, [1, 2, 3, 4, 1], [("building", "yes")]),
            (101, [1, 2, 999, 1], [("building", "yes")]),   # dangling
            (102, [1, 2, 1], [("building", "yes")]),        # degenerate
            (103, [1, 2, 3, 4, 1], [("building", "no")]),   # excluded by value
            (104, [1, 2, 3, 4, 1], [("highway", "path")]),  # not a building
        ]
        _, stats = parse_osm_buildings(osm_xml(SQUARE_NODES, ways))
        building_tagged = 3  # ids 100, 101, 102
        assert stats.buildings + stats.dangling + stats.degenerate == building_tagged
        assert stats.ways == 5

    def test_malformed_xml_is_fatal_with_position(self):
        with pytest.raises(OsmXmlError, match="line"):
            parse_osm_buildings(io.BytesIO(b"<osm><node id='1' lat='1'"))

    def test_jsonl_round_trip(self, tmp_path):
        stream = osm_xml(SQUARE_NODES, [(100, [1, 2, 3, 4, 1], [("building", "yes")])])
        buildings, _ = parse_osm_buildings(stream)
        path = tmp_path / "buildings.jsonl"
        write_buildings_jsonl(buildings, path)
        assert read_buildings_jsonl(path) == buildings


class TestCentroid:
    def test_unit_square_symmetry(self):
        lat, lng = centroid(SQUARE)
        assert lat == pytest.approx(47.0005, abs=1e-12)
        assert lng == pytest.approx(8.0005, abs=1e-12)

    def test_collinear_ring_falls_back_to_vertex_mean(self):
        ring = [(0.0, 0.0), (0.0, 1.0), (0.0, 2.0), (0.0, 3.0), (0.0, 0.0)]
        lat, lng = centroid(ring)
        assert (lat, lng) == (0.0, 1.5)

    def test_l_shaped_hexagon_matches_hand_shoelace(self):
        # (lng, lat) vertices (0,0),(2,0),(2,1),(1,1),(1,2),(0,2):
        # doubled area = 6, Cx = 15/18 = 5/6, Cy = 5/6 by the shoelace sums
        ring = [(0.0, 0.0), (0.0, 2.0), (1.0, 2.0), (1.0, 1.0), (2.0, 1.0),
                (2.0, 0.0), (0.0, 0.0)]
        lat, lng = centroid(ring)
        assert lat == pytest.approx(5.0 / 6.0, abs=1e-12)
        assert lng == pytest.approx(5.0 / 6.0, abs=1e-12)

    def test_translation_equivariance(self):
        base = [(0.0, 0.0), (0.0, 2.0), (1.0, 2.0), (1.0, 1.0), (2.0, 1.0),
                (2.0, 0.0), (0.0, 0.0)]
        lat0, lng0 = centroid(base)
        dlat, dlng = 47.123456789, 8.987654321
        shifted = [(la + dlat, ln + dlng) for la, ln in base]
        lat1, lng1 = centroid(shifted)
        assert lat1 - lat0 == pytest.approx(dlat, abs=1e-9)
        assert lng1 - lng0 == pytest.approx(dlng, abs=1e-9)

    def test_vertex_order_reversal_invariant(self):
        ring = [(0.0, 0.0), (0.0, 2.0), (1.0, 2.0), (1.0, 1.0), (2.0, 1.0),
                (2.0, 0.0), (0.0, 0.0)]
        fwd = centroid(ring)
        rev = centroid(list(reversed(ring)))
        assert fwd == pytest.approx(rev, abs=1e-12)

    def test_open_ring_is_contract_violation(self):
        with pytest.raises(ContractViolation):
            centroid([(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)])

    def test_centroid_inside_bounding_box(self):
        (b,), _ = parse_osm_buildings(osm_xml(
            SQUARE_NODES, [(100, [1, 2, 3, 4, 1], [("building", "yes")])]))
        lats = [p[0] for p in b.footprint]
        lngs = [p[1] for p in b.footprint]
        assert min(lats) <= b.centroid_lat <= max(lats)
        assert min(lngs) <= b.centroid_lng <= max(lngs)
