"""Z-score scaling fitted on training data only."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class StandardScaler:
    """Per-dimension (mean, stddev) from the training set.

    Constant dimensions are flagged and centered but not divided, so they
    pass through with their raw spread (zero) intact.
    """

    mean: np.ndarray
    std: np.ndarray            # divisor actually applied; 1.0 on constant dims
    constant_dims: np.ndarray  # bool per dimension

    @classmethod
    def fit(cls, X: np.ndarray) -> "StandardScaler":
        X = np.asarray(X, dtype=np.float64)
        mean = X.mean(axis=0)
        raw_std = X.std(axis=0)
        constant = raw_std == 0.0
        std = np.where(constant, 1.0, raw_std)
        return cls(mean=mean, std=std, constant_dims=constant)

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.mean) / self.std

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist(),
                "constant_dims": self.constant_dims.astype(int).tolist()}

    @classmethod
    def from_dict(cls, obj: dict) -> "StandardScaler":
        return cls(mean=np.asarray(obj["mean"], dtype=np.float64),
                   std=np.asarray(obj["std"], dtype=np.float64),
                   constant_dims=np.asarray(obj["constant_dims"], dtype=bool))
