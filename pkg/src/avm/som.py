"""Self-organizing map: batch training, BMU search, diagnostics, export.

The map is a rows x cols grid of prototype vectors ("codebook") living in
z-scored feature space. Training is the deterministic batch formulation:
every epoch assigns each sample to its best-matching unit (BMU), then moves
every node to the Gaussian-neighborhood-weighted mean of the assigned
samples, with the neighborhood radius shrinking linearly across epochs.
Normalization statistics are stored on the model, so all public entry points
accept raw-space data.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, ContractViolation, EmptyDataError

LINEAR_PCA = "linear_pca"
RANDOM_UNIFORM = "random_uniform"

_BMU_CHUNK = 4096          # rows per distance-matrix block during assignment
_EMPTY_DENOM = 1e-300      # below this a node kept its previous weights


@dataclass
class SomConfig:
    """Grid geometry and training schedule.

    ``sigma_start`` defaults to ``max(rows, cols) / 2`` when left ``None``.
    """

    rows: int
    cols: int
    epochs: int = 20
    sigma_start: Optional[float] = None
    sigma_end: float = 0.5
    init: str = LINEAR_PCA
    seed: int = 0

    def resolved_sigma_start(self) -> float:
        if self.sigma_start is not None:
            return float(self.sigma_start)
        return max(self.rows, self.cols) / 2.0

    def check(self) -> None:
        if self.rows < 1 or self.cols < 1 or self.rows * self.cols < 4:
            raise ConfigError("grid must have at least 4 nodes")
        if self.epochs < 1:
            raise ConfigError("epochs must be positive")
        start, end = self.resolved_sigma_start(), self.sigma_end
        if not (start >= end >= 0.1):
            raise ConfigError(
                f"need sigma_start >= sigma_end >= 0.1, got {start} and {end}")
        if self.init not in (LINEAR_PCA, RANDOM_UNIFORM):
            raise ConfigError(f"unknown init {self.init!r}")


def default_grid(n: int, aspect: float = 1.0) -> tuple:
    """Heuristic grid size: about 5*sqrt(n) nodes, capped at 50x50."""
    total = 5.0 * math.sqrt(max(n, 1))
    rows = int(math.ceil(math.sqrt(total * aspect)))
    rows = min(50, max(2, rows))
    cols = min(50, max(2, int(math.ceil(total / rows))))
    return rows, cols


@dataclass
class SomModel:
    """A trained map: codebook in normalized space plus the z-score stats."""

    config: SomConfig
    codebook: np.ndarray          # (rows*cols, d), normalized space
    norm_mean: np.ndarray         # (d,)
    norm_std: np.ndarray          # (d,), strictly positive
    feature_names: list
    qe_initial: float = math.nan  # quantization error of the initial codebook
    qe_final: float = math.nan

    @property
    def n_nodes(self) -> int:
        return self.config.rows * self.config.cols

    @property
    def dim(self) -> int:
        return self.codebook.shape[1]

    def grid_positions(self) -> np.ndarray:
        """(n_nodes, 2) array of (row, col) grid coordinates, node-index order."""
        rows, cols = self.config.rows, self.config.cols
        r, c = np.divmod(np.arange(rows * cols), cols)
        return np.column_stack([r, c]).astype(np.float64)

    def normalize(self, data: np.ndarray) -> np.ndarray:
        return (np.asarray(data, dtype=np.float64) - self.norm_mean) / self.norm_std

    def denormalize(self, data: np.ndarray) -> np.ndarray:
        return np.asarray(data, dtype=np.float64) * self.norm_std + self.norm_mean

    def resolve_mask(self, mask) -> np.ndarray:
        """Turn a mask (dim indices or feature names, or None) into indices."""
        if mask is None:
            return np.arange(self.dim)
        idx = []
        for m in mask:
            if isinstance(m, str):
                if m not in self.feature_names:
                    raise ContractViolation(f"unknown feature {m!r} in mask")
                idx.append(self.feature_names.index(m))
            else:
                idx.append(int(m))
        if not idx:
            raise ContractViolation("mask must name at least one dimension")
        return np.unique(np.asarray(idx, dtype=np.intp))


def train_som(data: np.ndarray, config: SomConfig,
              feature_names: Optional[Sequence[str]] = None,
              allow_constant: bool = False) -> SomModel:
    """Batch-train a SOM on an (n, d) raw-space matrix.

    Deterministic for a given (data, config). Raises ``EmptyDataError`` on
    empty input and ``ConfigError`` on constant columns, unless
    ``allow_constant`` is set, in which case a constant dimension is
    normalized with stddev 1 (its normalized values are all zero). A single
    sample carries no scale and is always handled that way.
    """
    config.check()
    X = np.asarray(data, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyDataError("training data is empty")
    n, d = X.shape
    names = list(feature_names) if feature_names is not None else [
        f"f{j}" for j in range(d)]
    if len(names) != d:
        raise ConfigError(f"got {len(names)} feature names for {d} dimensions")

    mean = X.mean(axis=0)
    if n >= 2:
        std = X.std(axis=0)
        constant = np.flatnonzero(std == 0.0)
        if constant.size and not allow_constant:
            raise ConfigError(
                "constant column(s): " + ", ".join(names[j] for j in constant))
        std[constant] = 1.0
    else:
        std = np.ones(d)
    if n < config.rows * config.cols:
        warnings.warn(
            f"training {config.rows * config.cols} nodes on only {n} samples",
            stacklevel=2)

    Xn = (X - mean) / std
    rng = np.random.default_rng(config.seed)
    codebook = _init_codebook(Xn, config, rng)

    model = SomModel(config=config, codebook=codebook, norm_mean=mean,
                     norm_std=std, feature_names=names)
    grid = model.grid_positions()
    grid_d2 = ((grid[:, None, :] - grid[None, :, :]) ** 2).sum(axis=2)

    model.qe_initial = _qe_normalized(codebook, Xn)
    sigmas = np.linspace(config.resolved_sigma_start(), config.sigma_end,
                         config.epochs)
    for sigma in sigmas:
        bmu_idx = _bmu_batch(codebook, Xn)
        K = codebook.shape[0]
        counts = np.bincount(bmu_idx, minlength=K).astype(np.float64)
        sums = np.empty((K, d))
        for j in range(d):
            sums[:, j] = np.bincount(bmu_idx, weights=Xn[:, j], minlength=K)
        H = np.exp(-grid_d2 / (2.0 * sigma * sigma))
        denom = H @ counts
        numer = H @ sums
        updated = denom > _EMPTY_DENOM
        codebook = np.where(updated[:, None],
                            numer / np.maximum(denom, _EMPTY_DENOM)[:, None],
                            codebook)

    model.codebook = codebook
    model.qe_final = _qe_normalized(codebook, Xn)
    return model


def _init_codebook(Xn: np.ndarray, config: SomConfig, rng) -> np.ndarray:
    n, d = Xn.shape
    K = config.rows * config.cols
    if config.init == RANDOM_UNIFORM:
        lo, hi = Xn.min(axis=0), Xn.max(axis=0)
        return rng.uniform(lo, hi, size=(K, d))

    # Linear PCA: a regular grid spanning the top-2 principal axes at +-2
    # standard deviations (data is already centered by the z-scoring).
    _u, s, vt = np.linalg.svd(Xn, full_matrices=False)
    axis_std = s / math.sqrt(n)
    pc1 = vt[0] * axis_std[0] if s.size >= 1 and axis_std[0] > 0 else np.zeros(d)
    if s.size >= 2 and axis_std[1] > 0:
        pc2 = vt[1] * axis_std[1]
    else:
        pc2 = np.zeros(d)
    row_offsets = np.linspace(-2.0, 2.0, config.rows) if config.rows > 1 else np.zeros(1)
    col_offsets = np.linspace(-2.0, 2.0, config.cols) if config.cols > 1 else np.zeros(1)
    codebook = (row_offsets[:, None, None] * pc1[None, None, :]
                + col_offsets[None, :, None] * pc2[None, None, :])
    return codebook.reshape(K, d)


def _bmu_batch(codebook: np.ndarray, Xn: np.ndarray) -> np.ndarray:
    """BMU index per normalized sample row; ties go to the lowest node index."""
    n = Xn.shape[0]
    out = np.empty(n, dtype=np.intp)
    node_sq = (codebook * codebook).sum(axis=1)
    for start in range(0, n, _BMU_CHUNK):
        chunk = Xn[start:start + _BMU_CHUNK]
        d2 = node_sq[None, :] - 2.0 * (chunk @ codebook.T)
        out[start:start + _BMU_CHUNK] = np.argmin(d2, axis=1)
    return out


def bmu(model: SomModel, x, mask=None) -> int:
    """Best-matching node for one raw-space vector.

    ``mask`` restricts the distance to a subset of dimensions (indices or
    feature names); queries may then leave the other components at any
    finite value. Ties break to the lowest node index.
    """
    dims = model.resolve_mask(mask)
    xn = model.normalize(np.asarray(x, dtype=np.float64))
    if not np.all(np.isfinite(xn[dims])):
        raise ContractViolation("query vector is not finite in the masked dimensions")
    d2 = ((model.codebook[:, dims] - xn[dims]) ** 2).sum(axis=1)
    return int(np.argmin(d2))


def quantization_error(model: SomModel, data, mask=None) -> float:
    """Mean distance (masked dims, normalized space) from samples to their BMU."""
    dims = model.resolve_mask(mask)
    X = np.asarray(data, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyDataError("quantization_error needs a non-empty matrix")
    Xn = model.normalize(X)[:, dims]
    return _qe_normalized(model.codebook[:, dims], Xn)


def _qe_normalized(codebook: np.ndarray, Xn: np.ndarray) -> float:
    idx = _bmu_batch(codebook, Xn)
    diff = Xn - codebook[idx]
    return float(np.sqrt((diff * diff).sum(axis=1)).mean())


def node_assignments(model: SomModel, data) -> dict:
    """Partition data row indices by full-mask BMU: node index -> row list."""
    X = np.asarray(data, dtype=np.float64)
    if X.shape[0] == 0:
        return {}
    idx = _bmu_batch(model.codebook, model.normalize(X))
    out: dict = {}
    for row, node in enumerate(idx):
        out.setdefault(int(node), []).append(row)
    return out


@dataclass
class ComponentPlanes:
    """Per-feature grids of codebook values, normalized and denormalized."""

    feature_names: list
    normalized: np.ndarray    # (d, rows, cols)
    denormalized: np.ndarray  # (d, rows, cols)


def component_planes(model: SomModel) -> ComponentPlanes:
    rows, cols = model.config.rows, model.config.cols
    normalized = model.codebook.T.reshape(model.dim, rows, cols).copy()
    denorm = model.denormalize(model.codebook).T.reshape(model.dim, rows, cols)
    return ComponentPlanes(feature_names=list(model.feature_names),
                           normalized=normalized, denormalized=denorm)


def write_component_planes_csv(model: SomModel, directory) -> list:
    """Write one rows x cols CSV grid per feature; returns the file paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    planes = component_planes(model)
    paths = []
    for j, name in enumerate(planes.feature_names):
        path = directory / f"plane_{j:02d}_{name}.csv"
        np.savetxt(path, planes.denormalized[j], delimiter=",", fmt="%.10g")
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# Serialization (versioned JSON)

def som_to_dict(model: SomModel) -> dict:
    return {
        "version": 1,
        "config": {
            "rows": model.config.rows,
            "cols": model.config.cols,
            "epochs": model.config.epochs,
            "sigma_start": model.config.resolved_sigma_start(),
            "sigma_end": model.config.sigma_end,
            "init": model.config.init,
            "seed": model.config.seed,
        },
        "norm_stats": {
            "mean": model.norm_mean.tolist(),
            "stddev": model.norm_std.tolist(),
        },
        "feature_names": list(model.feature_names),
        "codebook": model.codebook.ravel().tolist(),  # row-major
        "qe_initial": model.qe_initial,
        "qe_final": model.qe_final,
    }


def som_from_dict(obj: dict) -> SomModel:
    if obj.get("version") != 1:
        raise ValueError(f"unsupported SOM model version {obj.get('version')!r}")
    cfg = SomConfig(**obj["config"])
    names = list(obj["feature_names"])
    codebook = np.asarray(obj["codebook"], dtype=np.float64).reshape(
        cfg.rows * cfg.cols, len(names))
    return SomModel(
        config=cfg,
        codebook=codebook,
        norm_mean=np.asarray(obj["norm_stats"]["mean"], dtype=np.float64),
        norm_std=np.asarray(obj["norm_stats"]["stddev"], dtype=np.float64),
        feature_names=names,
        qe_initial=float(obj.get("qe_initial", math.nan)),
        qe_final=float(obj.get("qe_final", math.nan)),
    )


def save_som(model: SomModel, path) -> None:
    Path(path).write_text(json.dumps(som_to_dict(model)), encoding="utf-8")


def load_som(path) -> SomModel:
    return som_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
