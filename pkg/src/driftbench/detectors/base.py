"""Shared result type and input checks for the detectors."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class DetectionResult:
    scores: np.ndarray
    flags: np.ndarray
    method: str
    threshold: float
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=float)
        self.flags = np.asarray(self.flags, dtype=bool)
        if self.scores.shape != self.flags.shape:
            raise ValueError("scores and flags must have the same shape")

    def __len__(self):
        return len(self.scores)

    def to_dict(self):
        return {"method": self.method, "threshold": float(self.threshold),
                "scores": [float(s) for s in self.scores],
                "flags": [bool(f) for f in self.flags]}


def check_series(x, name="series", min_len=1):
    """1-d finite float array with at least ``min_len`` entries."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_len:
        raise ValueError(f"{name} needs at least {min_len} values, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinite values")
    return arr
