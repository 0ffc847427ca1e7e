import json

import pytest
from click.testing import CliRunner

from avm.cli import main
from avm.evaluation import SyntheticConfig, generate_synthetic
from avm.ingest import write_listings_jsonl
from avm.osmx import write_buildings_jsonl, Building


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    listings, _ = generate_synthetic(SyntheticConfig(n=250, seed=5, noise_sd_chf=100))
    raw_path = root / "snapshot.jsonl"
    write_listings_jsonl(listings, raw_path)

    buildings = [Building(i, l.lat, l.lng, [], 0) for i, l in enumerate(listings[:50])]
    buildings_path = root / "buildings.jsonl"
    write_buildings_jsonl(buildings, buildings_path)
    return {"root": root, "raw": raw_path, "buildings": buildings_path,
            "n": len(listings)}


def run_ok(args):
    result = CliRunner().invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


def test_ingest_clean_and_rejects(workspace):
    root = workspace["root"]
    out = root / "clean.jsonl"
    rejects = root / "rejects.jsonl"
    result = run_ok(["ingest", "--in", str(workspace["raw"]), "--format", "jsonl",
                     "--impute-k", "5", "--seed", "42",
                     "--out", str(out), "--rejects", str(rejects)])
    assert "clean=" in result.output
    lines = [l for l in out.read_text().splitlines() if l]
    assert len(lines) == workspace["n"]


def test_ingest_csv_with_bad_line(tmp_path):
    src = tmp_path / "bad.csv"
    src.write_text("listing_id,rooms\nA1,3\nA2,abc\n")
    result = run_ok(["ingest", "--in", str(src), "--format", "csv",
                     "--impute-k", "0",
                     "--out", str(tmp_path / "clean.jsonl"),
                     "--rejects", str(tmp_path / "rej.jsonl")])
    assert "line_errors=1" in result.output


def test_train_eval_index_analyze_export(workspace):
    root = workspace["root"]
    clean = root / "clean.jsonl"
    assert clean.exists()  # from the ingest test

    run_ok(["train", "--algo", "knn", "--train", str(clean),
            "--out", str(root / "knn.json")])
    assert json.loads((root / "knn.json").read_text())["kind"] == "knn"

    run_ok(["train", "--algo", "index", "--train", str(clean),
            "--out", str(root / "index.json")])

    result = run_ok(["eval", "--data", str(clean), "--algos", "knn,ols",
                     "--seeds", "1,2", "--out", str(root / "report.csv")])
    rows = (root / "report.csv").read_text().splitlines()
    assert rows[0].startswith("algo,")
    assert len(rows) == 1 + 4  # header + 2 algos x 2 seeds

    run_ok(["index", "--model", str(root / "index.json"),
            "--buildings", str(workspace["buildings"]),
            "--strategy", "median", "--out", str(root / "prices.jsonl")])
    priced = [json.loads(l) for l in (root / "prices.jsonl").read_text().splitlines()]
    assert len(priced) == 50
    assert all(p["price_per_m2"] > 0 for p in priced)

    result = run_ok(["analyze", "zip-availability", "--data", str(clean),
                     "--min-rooms", "2", "--min-space", "40", "--max-rent", "4000"])
    payload = json.loads(result.output)
    assert payload  # at least one zip present


def test_store_roundtrip_via_cli(workspace, tmp_path):
    root = workspace["root"]
    store_dir = tmp_path / "store"
    run_ok(["ingest", "--in", str(workspace["raw"]), "--out",
            str(tmp_path / "clean.jsonl"), "--store", str(store_dir)])
    export_path = tmp_path / "export.jsonl"
    result = run_ok(["export", "--store", str(store_dir), "--out", str(export_path)])
    assert f"exported {workspace['n']}" in result.output

    # re-ingest the export into a second store: dedup indexes agree
    store2 = tmp_path / "store2"
    run_ok(["ingest", "--in", str(export_path), "--out",
            str(tmp_path / "clean2.jsonl"), "--store", str(store2)])
    idx1 = json.loads((store_dir / "dedup_index.json").read_text())
    idx2 = json.loads((store2 / "dedup_index.json").read_text())
    assert idx1 == idx2


def test_export_csv(workspace, tmp_path):
    store_dir = tmp_path / "store"
    run_ok(["ingest", "--in", str(workspace["raw"]), "--out",
            str(tmp_path / "clean.jsonl"), "--store", str(store_dir)])
    out = tmp_path / "export.csv"
    run_ok(["export", "--store", str(store_dir), "--format", "csv",
            "--out", str(out)])
    lines = out.read_text().splitlines()
    assert lines[0].startswith("listing_id,")
    assert len(lines) == 1 + workspace["n"]


def test_osm_command(tmp_path):
    xml = ("<osm>"
           "<node id='1' lat='47.0' lon='8.0'/><node id='2' lat='47.0' lon='8.001'/>"
           "<node id='3' lat='47.001' lon='8.001'/><node id='4' lat='47.001' lon='8.0'/>"
           "<way id='9'><nd ref='1'/><nd ref='2'/><nd ref='3'/><nd ref='4'/><nd ref='1'/>"
           "<tag k='building' v='yes'/></way></osm>")
    src = tmp_path / "map.osm"
    src.write_text(xml)
    out = tmp_path / "buildings.jsonl"
    result = run_ok(["osm", "--in", str(src), "--out", str(out)])
    assert "buildings=1" in result.output
    obj = json.loads(out.read_text().strip())
    assert obj["building_id"] == 9


def test_unknown_algo_is_usage_error(workspace):
    result = CliRunner().invoke(main, ["eval", "--data", str(workspace["root"] / "clean.jsonl"),
                                       "--algos", "xgboost", "--seeds", "1"])
    assert result.exit_code != 0
