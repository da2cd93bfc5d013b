"""Per-user baseline statistics and z-normalization."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

SIGMA_FLOOR = 1e-6


@dataclass(frozen=True)
class BaselineStats:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def from_samples(cls, X):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.shape[0] < 2:
            raise ValueError("baseline statistics need at least 2 samples")
        return cls(X.mean(axis=0), X.std(axis=0))

    @property
    def scale(self):
        return np.maximum(self.std, SIGMA_FLOOR)


def z_normalize(x, stats):
    return (np.asarray(x, dtype=float) - stats.mean) / stats.scale


def composite_tone_index(features, stats):
    """Equal-weight mean of the baseline z-scores of the tone features.

    Accepts one feature vector or an ``(n, 4)`` matrix.
    """
    z = z_normalize(features, stats)
    return z.mean(axis=-1)


class BaselineScaler(BaseEstimator, TransformerMixin):
    """z-normalizes against the statistics of the first ``n_baseline`` rows seen in fit."""

    def __init__(self, n_baseline=10):
        self.n_baseline = n_baseline

    def fit(self, X, y=None):
        X = check_array(X)
        head = X if self.n_baseline is None else X[: self.n_baseline]
        self.stats_ = BaselineStats.from_samples(head)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "stats_")
        return z_normalize(check_array(X), self.stats_)
