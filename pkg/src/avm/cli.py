"""Umbrella command line: ingest, osm, train, eval, index, analyze, serve, export."""

from __future__ import annotations

import datetime as dt
import json
from pathlib import Path

import click

from . import analytics as an
from . import evaluation as ev
from .ingest import Geocoder, impute, parse_listings, write_listings_jsonl, listings_to_csv_rows
from .listings import RejectReport, FEATURE_NAMES, encode_many, validate
from .osmx import parse_osm_buildings, read_buildings_jsonl, write_buildings_jsonl
from .regress import ALGORITHMS, save_model
from .service import ServeConfig, SnapshotStore
from .service.api import serve as run_server
from .spatial_index import (
    build_index,
    index_all_buildings,
    load_index,
    save_index,
    write_building_index_jsonl,
)
from .errors import GeocodeNotFound, GeocodeUnavailable


@click.group()
def main():
    """Rental-market valuation engine."""


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["jsonl", "csv"]), default="jsonl")
@click.option("--impute-k", default=5, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--rejects", "rejects_path", type=click.Path())
@click.option("--geocode-stub", type=click.Path(exists=True),
              help="JSON stub table to fill missing coordinates from addresses.")
@click.option("--store", "store_dir", type=click.Path(),
              help="Also append the clean listings to this snapshot store.")
@click.option("--snapshot-date", type=str, default=None,
              help="Snapshot date for --store (default: date of first listing).")
def ingest(in_path, fmt, impute_k, seed, out_path, rejects_path, geocode_stub,
           store_dir, snapshot_date):
    """Parse, geocode, impute, validate a snapshot file; write clean listings."""
    raws, line_errors = parse_listings(in_path, fmt)
    for err in line_errors:
        click.echo(f"line {err.line_no}: {err.reason}", err=True)

    if geocode_stub:
        coder = Geocoder.from_stub_file(geocode_stub)
        for raw in raws:
            if raw.lat is None and raw.address:
                try:
                    entry = coder.lookup(raw.address)
                    raw.lat, raw.lng = entry.lat, entry.lng
                except (GeocodeNotFound, GeocodeUnavailable):
                    pass

    if raws and impute_k > 0:
        raws = impute(raws, k=impute_k, seed=seed)

    clean, rejects = [], []
    for raw in raws:
        result = validate(raw)
        if isinstance(result, RejectReport):
            rejects.append(result)
        else:
            clean.append(result)

    write_listings_jsonl(clean, out_path)
    if rejects_path:
        with open(rejects_path, "w", encoding="utf-8") as fh:
            for r in rejects:
                fh.write(json.dumps({"listing_id": r.listing_id,
                                     "failed_rules": r.failed_rules}))
                fh.write("\n")

    if store_dir:
        if snapshot_date:
            date = dt.date.fromisoformat(snapshot_date)
        elif clean:
            date = clean[0].snapshot_date
        else:
            raise click.UsageError("--store given but no clean listings and no --snapshot-date")
        summary = SnapshotStore(store_dir).append_snapshot(date, clean)
        click.echo(f"store: added={summary.added} duplicates={summary.duplicates} "
                   f"updated={summary.updated}")

    click.echo(f"parsed={len(raws) + len(line_errors)} clean={len(clean)} "
               f"rejected={len(rejects)} line_errors={len(line_errors)}")


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def osm(in_path, out_path):
    """Extract buildings (centroid + footprint) from an OSM XML file."""
    buildings, stats = parse_osm_buildings(in_path)
    write_buildings_jsonl(buildings, out_path)
    click.echo(f"nodes={stats.nodes} ways={stats.ways} buildings={stats.buildings} "
               f"dangling={stats.dangling} degenerate={stats.degenerate} "
               f"relations_skipped={stats.relations_skipped}")


def _load_clean(path):
    from .listings import clean_listing_from_dict
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(clean_listing_from_dict(json.loads(line)))
    return out


@main.command()
@click.option("--algo", required=True,
              type=click.Choice(sorted(ALGORITHMS) + ["index"]))
@click.option("--train", "train_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--seed", default=0, show_default=True)
def train(algo, train_path, out_path, seed):
    """Fit one valuation model (or the spatial price index) on clean listings."""
    listings = _load_clean(train_path)
    if algo == "index":
        model = build_index(listings)
        save_index(model, out_path)
        click.echo(f"index model: nodes={model.som.n_nodes} "
                   f"samples={len(model.training_samples)} -> {out_path}")
        return
    X, y = encode_many(listings)
    model = ALGORITHMS[algo].fit(X, y, seed)
    tag = save_model(model, algo, out_path, feature_names=FEATURE_NAMES)
    click.echo(f"{algo} model version {tag} -> {out_path}")


@main.command("eval")
@click.option("--data", "data_path", required=True, type=click.Path(exists=True))
@click.option("--algos", default="rf,knn,ols,bridge,lp1,lp2,lp3", show_default=True)
@click.option("--seeds", default="1,2,3,4,5", show_default=True)
@click.option("--out", "out_path", type=click.Path(),
              help="Report file; .csv for CSV, anything else for the text table.")
def eval_cmd(data_path, algos, seeds, out_path):
    """Repeated-holdout benchmark of the valuation algorithms."""
    listings = _load_clean(data_path)
    algo_list = [a.strip() for a in algos.split(",") if a.strip()]
    seed_list = [int(s) for s in seeds.split(",") if s.strip()]
    unknown = [a for a in algo_list if a not in ALGORITHMS]
    if unknown:
        raise click.UsageError(f"unknown algorithms: {', '.join(unknown)}")
    reports = ev.benchmark_listings(listings, algo_list, seed_list)
    if out_path and out_path.endswith(".csv"):
        Path(out_path).write_text(ev.render_report_csv(reports), encoding="utf-8")
    elif out_path:
        Path(out_path).write_text(ev.render_report_text(reports), encoding="utf-8")
    else:
        click.echo(ev.render_report_text(reports), nl=False)


@main.command("index")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--buildings", "buildings_path", required=True, type=click.Path(exists=True))
@click.option("--strategy", type=click.Choice(["median", "sample"]), default="median",
              show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def index_cmd(model_path, buildings_path, strategy, seed, out_path):
    """Bulk price-per-m2 estimates for a building list."""
    model = load_index(model_path)
    buildings = read_buildings_jsonl(buildings_path)
    rows = index_all_buildings(model, buildings, strategy=strategy, seed=seed)
    write_building_index_jsonl(rows, out_path)
    click.echo(f"indexed {len(rows)} buildings -> {out_path}")


@main.group()
def analyze():
    """Market sensitivity queries over a clean-listing file."""


def _period_option(fn):
    fn = click.option("--from", "from_date", default="1800-01-01", show_default=True)(fn)
    fn = click.option("--to", "to_date", default="2999-12-31", show_default=True)(fn)
    return fn


def _emit(obj, out_path):
    text = json.dumps(obj, indent=1, sort_keys=True)
    if out_path:
        Path(out_path).write_text(text + "\n", encoding="utf-8")
    else:
        click.echo(text)


@analyze.command("zip-availability")
@click.option("--data", "data_path", required=True, type=click.Path(exists=True))
@click.option("--min-rooms", required=True, type=float)
@click.option("--min-space", required=True, type=float)
@click.option("--max-rent", required=True, type=float)
@_period_option
@click.option("--out", "out_path", type=click.Path())
def zip_availability_cmd(data_path, min_rooms, min_space, max_rent, from_date,
                         to_date, out_path):
    listings = _load_clean(data_path)
    q = an.MarketQuery(min_rooms, min_space, max_rent,
                       an.parse_period(from_date, to_date))
    result = an.zip_availability(listings, q)
    _emit({str(z): {"n_total": s.n_total, "n_match": s.n_match, "pct": s.pct}
           for z, s in sorted(result.by_zip.items())}, out_path)


@analyze.command("budget-sweep")
@click.option("--data", "data_path", required=True, type=click.Path(exists=True))
@click.option("--zip", "zip_code", required=True, type=int)
@click.option("--min-rooms", required=True, type=float)
@click.option("--min-space", required=True, type=float)
@click.option("--budgets", required=True, help="Comma-separated ascending CHF budgets.")
@_period_option
@click.option("--out", "out_path", type=click.Path())
def budget_sweep_cmd(data_path, zip_code, min_rooms, min_space, budgets,
                     from_date, to_date, out_path):
    listings = _load_clean(data_path)
    budget_list = [float(b) for b in budgets.split(",") if b.strip()]
    curve = an.budget_sweep(listings, zip_code, min_rooms, min_space, budget_list,
                            an.parse_period(from_date, to_date))
    _emit({"zip": curve.zip, "budgets": curve.budgets,
           "pct_matched": curve.pct_matched, "n_total": curve.n_total}, out_path)


@analyze.command("histograms")
@click.option("--data", "data_path", required=True, type=click.Path(exists=True))
@click.option("--zip", "zip_code", required=True, type=int)
@click.option("--min-rooms", required=True, type=float)
@click.option("--min-space", required=True, type=float)
@click.option("--max-rent", required=True, type=float)
@click.option("--bins", "n_bins", default=20, show_default=True)
@_period_option
@click.option("--out", "out_path", type=click.Path())
def histograms_cmd(data_path, zip_code, min_rooms, min_space, max_rent, n_bins,
                   from_date, to_date, out_path):
    listings = _load_clean(data_path)
    q = an.MarketQuery(min_rooms, min_space, max_rent,
                       an.parse_period(from_date, to_date))
    hist = an.match_histograms(listings, zip_code, q, n_bins=n_bins)
    _emit({"zip": hist.zip, "n_total": hist.n_total, "n_match": hist.n_match,
           "dimensions": {name: {"bin_edges": h.bin_edges,
                                 "total_counts": h.total_counts,
                                 "matched_counts": h.matched_counts}
                          for name, h in hist.dimensions.items()}}, out_path)


@main.command()
@click.option("--store", "store_dir", required=True, type=click.Path())
@click.option("--models", "model_dir", required=True, type=click.Path())
@click.option("--index-model", type=click.Path())
@click.option("--ui", "ui_dir", type=click.Path())
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True)
def serve(store_dir, model_dir, index_model, ui_dir, host, port):
    """Run the HTTP JSON API (and optionally the static UI)."""
    run_server(ServeConfig(store_dir=store_dir, model_dir=model_dir,
                           index_model=index_model, ui_dir=ui_dir),
               host=host, port=port)


@main.command()
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True))
@click.option("--from", "from_date", default="1800-01-01", show_default=True)
@click.option("--to", "to_date", default="2999-12-31", show_default=True)
@click.option("--kind", type=click.Choice(["rent", "sale"]))
@click.option("--format", "fmt", type=click.Choice(["jsonl", "csv"]), default="jsonl")
@click.option("--out", "out_path", required=True, type=click.Path())
def export(store_dir, from_date, to_date, kind, fmt, out_path):
    """Export the latest listing versions from a snapshot store."""
    store = SnapshotStore(store_dir)
    period = an.parse_period(from_date, to_date)
    count = 0
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        if fmt == "jsonl":
            for line in store.export_lines(period, kind):
                fh.write(line)
                count += 1
        else:
            import csv as _csv
            from .listings import clean_listing_from_dict
            writer = _csv.writer(fh)
            writer.writerow(next(listings_to_csv_rows([])))
            for line in store.export_lines(period, kind):
                listing = clean_listing_from_dict(json.loads(line))
                rows = listings_to_csv_rows([listing])
                next(rows)
                writer.writerow(next(rows))
                count += 1
    click.echo(f"exported {count} listings -> {out_path}")


if __name__ == "__main__":
    main()
