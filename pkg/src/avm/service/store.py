"""Append-only snapshot store for clean listings.

Layout under the store directory:

    snapshots/snapshot-YYYY-MM-DD.jsonl   one file per snapshot date
    manifest.json                         date -> {file, record_count, checksum}
    dedup_index.json                      listing_id -> first/last seen, content hash
    feedback.jsonl                        user feedback log

Snapshot files are never rewritten once their date is in the manifest;
re-appending the same date is a no-op when the content checksum matches and
a ``ConflictError`` otherwise. A listing id may reappear on later dates;
queries return the latest version.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional, Sequence

from ..errors import ConflictError
from ..listings import CleanListing, clean_listing_from_dict, listing_to_dict

FEEDBACK_DIRECTIONS = ("too_high", "too_low", "about_right")
FEEDBACK_REASONS = ("condition", "view", "noise", "renovation", "other")
MAX_FEEDBACK_TEXT = 1000


@dataclass
class IngestSummary:
    added: int = 0
    duplicates: int = 0
    updated: int = 0


@dataclass
class FeedbackRecord:
    timestamp: str
    query_echo: dict
    estimate_chf: float
    user_direction: str
    reason_code: Optional[str] = None
    free_text: Optional[str] = None

    def check(self) -> None:
        if self.user_direction not in FEEDBACK_DIRECTIONS:
            raise ValueError(f"user_direction must be one of {FEEDBACK_DIRECTIONS}")
        if self.reason_code is not None and self.reason_code not in FEEDBACK_REASONS:
            raise ValueError(f"reason_code must be one of {FEEDBACK_REASONS}")
        if self.free_text is not None and len(self.free_text) > MAX_FEEDBACK_TEXT:
            raise ValueError(f"free_text exceeds {MAX_FEEDBACK_TEXT} characters")


def _content_line(listing: CleanListing) -> str:
    return json.dumps(listing_to_dict(listing), sort_keys=True)


def _content_hash(listing: CleanListing) -> str:
    # snapshot_date excluded: a re-post with unchanged fields is a duplicate
    obj = listing_to_dict(listing)
    obj.pop("snapshot_date", None)
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()


class SnapshotStore:
    def __init__(self, root):
        self.root = Path(root)
        self.snapshot_dir = self.root / "snapshots"
        self.snapshot_dir.mkdir(parents=True, exist_ok=True)
        self._manifest_path = self.root / "manifest.json"
        self._index_path = self.root / "dedup_index.json"
        self.feedback_path = self.root / "feedback.jsonl"
        self._write_lock = threading.Lock()
        self.manifest = self._read_json(self._manifest_path)
        self.index = self._read_json(self._index_path)

    @staticmethod
    def _read_json(path: Path) -> dict:
        if path.exists():
            return json.loads(path.read_text(encoding="utf-8"))
        return {}

    def _persist(self) -> None:
        for path, obj in ((self._manifest_path, self.manifest),
                          (self._index_path, self.index)):
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(obj, indent=1, sort_keys=True), encoding="utf-8")
            tmp.replace(path)

    # -- writes ------------------------------------------------------------

    def append_snapshot(self, date: dt.date, listings: Sequence[CleanListing]) -> IngestSummary:
        """Persist one dated batch; returns added/duplicate/updated counts."""
        with self._write_lock:
            date_key = date.isoformat()
            seen_ids = set()
            for listing in listings:
                if listing.listing_id in seen_ids:
                    raise ConflictError(
                        f"listing_id {listing.listing_id!r} appears twice in snapshot {date_key}")
                seen_ids.add(listing.listing_id)

            lines = [_content_line(l) for l in listings]
            blob = "".join(line + "\n" for line in lines)
            checksum = hashlib.sha256(blob.encode()).hexdigest()

            if date_key in self.manifest:
                entry = self.manifest[date_key]
                if entry["checksum"] == checksum:
                    return IngestSummary(added=0, duplicates=len(listings), updated=0)
                raise ConflictError(
                    f"snapshot {date_key} already finalized with different content")

            summary = IngestSummary()
            for listing in listings:
                chash = _content_hash(listing)
                known = self.index.get(listing.listing_id)
                if known is None:
                    summary.added += 1
                    self.index[listing.listing_id] = {
                        "first_seen": date_key, "last_seen": date_key, "content": chash}
                else:
                    if known["content"] == chash:
                        summary.duplicates += 1
                    else:
                        summary.updated += 1
                    known["content"] = chash
                    known["last_seen"] = max(known["last_seen"], date_key)
                    known["first_seen"] = min(known["first_seen"], date_key)

            filename = f"snapshot-{date_key}.jsonl"
            (self.snapshot_dir / filename).write_text(blob, encoding="utf-8")
            self.manifest[date_key] = {
                "file": filename, "record_count": len(listings), "checksum": checksum}
            self._persist()
            return summary

    # -- reads -------------------------------------------------------------

    def snapshot_dates(self) -> list:
        return sorted(dt.date.fromisoformat(k) for k in self.manifest)

    def _dates_in(self, period) -> list:
        start, end = period
        return [d for d in self.snapshot_dates() if start <= d <= end]

    def query_listings(self, period, zips=None) -> list:
        """Latest version of every listing whose snapshot date is in the period."""
        winners: dict = {}
        for date in self._dates_in(period):
            for listing in self._read_snapshot(date):
                if zips and listing.zip not in zips:
                    continue
                prior = winners.get(listing.listing_id)
                if prior is None or listing.snapshot_date >= prior.snapshot_date:
                    winners[listing.listing_id] = listing
        return [winners[key] for key in sorted(winners)]

    def _read_snapshot(self, date: dt.date) -> Iterator[CleanListing]:
        entry = self.manifest[date.isoformat()]
        path = self.snapshot_dir / entry["file"]
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    yield clean_listing_from_dict(json.loads(line))

    def export_lines(self, period, offer_kind: Optional[str] = None) -> Iterator[str]:
        """Stream canonical JSONL lines of the latest listing versions.

        Two passes: the first tracks only (id -> winning date) so memory
        stays at index scale, the second re-reads the files and emits the
        winning raw lines.
        """
        winning_date: dict = {}
        for date in self._dates_in(period):
            for listing in self._read_snapshot(date):
                if offer_kind and listing.offer_kind != offer_kind:
                    continue
                prior = winning_date.get(listing.listing_id)
                if prior is None or listing.snapshot_date >= prior:
                    winning_date[listing.listing_id] = listing.snapshot_date
        for date in self._dates_in(period):
            for listing in self._read_snapshot(date):
                if offer_kind and listing.offer_kind != offer_kind:
                    continue
                if winning_date.get(listing.listing_id) == listing.snapshot_date:
                    yield _content_line(listing) + "\n"

    # -- feedback ----------------------------------------------------------

    def append_feedback(self, record: FeedbackRecord) -> None:
        record.check()
        with self._write_lock:
            with open(self.feedback_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps({
                    "timestamp": record.timestamp,
                    "query_echo": record.query_echo,
                    "estimate_chf": record.estimate_chf,
                    "user_direction": record.user_direction,
                    "reason_code": record.reason_code,
                    "free_text": record.free_text,
                }))
                fh.write("\n")

    def read_feedback(self) -> list:
        if not self.feedback_path.exists():
            return []
        out = []
        with open(self.feedback_path, "r", encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    obj = json.loads(line)
                    out.append(FeedbackRecord(**obj))
        return out
