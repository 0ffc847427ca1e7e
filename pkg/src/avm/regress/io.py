"""Versioned JSON envelopes for fitted valuation models.

Envelope: {"kind", "version", "created_at", "feature_names", "payload"}.
``kind`` matches the CLI algorithm names (knn, rf, ols, bridge, lp1..lp3).
Forest payloads hold the trees as flat node arrays.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
from pathlib import Path

import numpy as np

from .forest import ForestModel, RegressionTree
from .knn import KnnModel
from .linear import LinearModel
from .localpoly import LocalPolyModel
from .scaler import StandardScaler

ENVELOPE_VERSION = 1


def model_payload(model) -> dict:
    if isinstance(model, KnnModel):
        return {
            "k": model.k,
            "scaler": model.scaler.to_dict(),
            "train_X": model.train_X.tolist(),
            "train_y": model.train_y.tolist(),
        }
    if isinstance(model, ForestModel):
        return {
            "n_trees": model.n_trees,
            "bootstrap_seed": model.bootstrap_seed,
            "min_samples_leaf": model.min_samples_leaf,
            "max_features_policy": model.max_features_policy,
            "bootstrap": model.bootstrap,
            "n_features": model.n_features,
            "meta": model.meta,
            "trees": [{
                "feature": t.feature.tolist(),
                "threshold": t.threshold.tolist(),
                "left": t.left.tolist(),
                "right": t.right.tolist(),
                "value": t.value.tolist(),
                "n_samples": t.n_samples.tolist(),
            } for t in model.trees],
        }
    if isinstance(model, LinearModel):
        return {
            "weights": model.weights.tolist(),
            "fit_kind": model.fit_kind,
            "alpha": _json_float(model.alpha),
            "beta": _json_float(model.beta),
            "converged": model.converged,
            "rank_deficient": model.rank_deficient,
        }
    if isinstance(model, LocalPolyModel):
        return {
            "order": model.order,
            "scaler": model.scaler.to_dict(),
            "train_X": model.train_X.tolist(),
            "train_y": model.train_y.tolist(),
            "onehot_dims": list(model.onehot_dims),
            "ridge_jitter": model.ridge_jitter,
            "pilot_k": model.pilot_k,
        }
    raise TypeError(f"cannot serialize model of type {type(model).__name__}")


def _json_float(value):
    if value is None:
        return None
    value = float(value)
    return value if np.isfinite(value) else repr(value)


def _parse_float(value):
    if value is None:
        return None
    return float(value)


def model_from_payload(kind: str, payload: dict):
    if kind == "knn":
        return KnnModel(
            scaler=StandardScaler.from_dict(payload["scaler"]),
            train_X=np.asarray(payload["train_X"], dtype=np.float64),
            train_y=np.asarray(payload["train_y"], dtype=np.float64),
            k=int(payload["k"]),
        )
    if kind == "rf":
        trees = [RegressionTree(
            feature=np.asarray(t["feature"], dtype=np.int32),
            threshold=np.asarray(t["threshold"], dtype=np.float64),
            left=np.asarray(t["left"], dtype=np.int32),
            right=np.asarray(t["right"], dtype=np.int32),
            value=np.asarray(t["value"], dtype=np.float64),
            n_samples=np.asarray(t["n_samples"], dtype=np.int32),
        ) for t in payload["trees"]]
        return ForestModel(
            n_trees=int(payload["n_trees"]),
            trees=trees,
            bootstrap_seed=int(payload["bootstrap_seed"]),
            min_samples_leaf=int(payload["min_samples_leaf"]),
            max_features_policy=payload["max_features_policy"],
            bootstrap=bool(payload["bootstrap"]),
            n_features=int(payload["n_features"]),
            meta=payload.get("meta", {}),
        )
    if kind in ("ols", "bridge"):
        return LinearModel(
            weights=np.asarray(payload["weights"], dtype=np.float64),
            fit_kind=payload["fit_kind"],
            alpha=_parse_float(payload.get("alpha")),
            beta=_parse_float(payload.get("beta")),
            converged=bool(payload.get("converged", True)),
            rank_deficient=bool(payload.get("rank_deficient", False)),
        )
    if kind in ("lp1", "lp2", "lp3"):
        return LocalPolyModel(
            scaler=StandardScaler.from_dict(payload["scaler"]),
            train_X=np.asarray(payload["train_X"], dtype=np.float64),
            train_y=np.asarray(payload["train_y"], dtype=np.float64),
            order=int(payload["order"]),
            onehot_dims=tuple(payload.get("onehot_dims", ())),
            ridge_jitter=float(payload.get("ridge_jitter", 1e-8)),
            pilot_k=int(payload.get("pilot_k", 0)),
        )
    raise ValueError(f"unknown model kind {kind!r}")


def save_model(model, kind: str, path, feature_names=()) -> str:
    """Write the envelope; returns the short content hash (model version)."""
    payload = model_payload(model)
    blob = json.dumps(payload, sort_keys=True)
    version_tag = hashlib.sha256(blob.encode()).hexdigest()[:12]
    envelope = {
        "kind": kind,
        "version": ENVELOPE_VERSION,
        "created_at": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
        "feature_names": list(feature_names),
        "model_version": version_tag,
        "payload": payload,
    }
    Path(path).write_text(json.dumps(envelope), encoding="utf-8")
    return version_tag


def load_model(path):
    """Read an envelope; returns (kind, model, envelope metadata)."""
    envelope = json.loads(Path(path).read_text(encoding="utf-8"))
    if envelope.get("version") != ENVELOPE_VERSION:
        raise ValueError(f"unsupported model envelope version in {path}")
    kind = envelope["kind"]
    model = model_from_payload(kind, envelope["payload"])
    meta = {k: envelope.get(k) for k in
            ("kind", "created_at", "feature_names", "model_version")}
    return kind, model, meta
