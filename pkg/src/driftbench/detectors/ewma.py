"""EWMA control chart for downward shifts of a scalar series."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ..features.baseline import SIGMA_FLOOR
from .base import DetectionResult, check_series


@dataclass(frozen=True)
class EwmaParams:
    mu: float
    sigma: float
    lam: float = 0.3
    z_threshold: float = 3.0

    def __post_init__(self):
        if not 0.0 < self.lam <= 1.0:
            raise ValueError("lambda must lie in (0, 1]")
        if not self.z_threshold > 0:
            raise ValueError("z_threshold must be > 0")


def ewma(series, params):
    """``S_n = lam*x_n + (1-lam)*S_{n-1}`` from ``S_0 = mu``, standardized by the
    asymptotic chart deviation ``sigma*sqrt(lam/(2-lam))``; flags ``z <= -z_threshold``."""
    x = check_series(series)
    lam = params.lam
    control_sd = max(params.sigma, SIGMA_FLOOR) * math.sqrt(lam / (2.0 - lam))
    s, smoothed = params.mu, np.empty_like(x)
    for n, xn in enumerate(x):
        s = lam * xn + (1.0 - lam) * s
        smoothed[n] = s
    z = (smoothed - params.mu) / control_sd
    return DetectionResult(-z, z <= -params.z_threshold, "ewma", params.z_threshold,
                           {"S": smoothed, "z": z})


class EwmaDetector(BaseEstimator):
    def __init__(self, lam=0.3, z_threshold=3.0, n_baseline=10):
        self.lam = lam
        self.z_threshold = z_threshold
        self.n_baseline = n_baseline

    def fit(self, X, y=None):
        x = check_series(X)[: self.n_baseline]
        self.mu_ = float(np.mean(x))
        self.sigma_ = float(np.std(x))
        return self

    def detect(self, X):
        check_is_fitted(self, "mu_")
        return ewma(X, EwmaParams(self.mu_, self.sigma_, self.lam, self.z_threshold))

    def score_samples(self, X):
        return self.detect(X).scores

    def predict(self, X):
        return self.detect(X).flags

    def _state(self):
        return {"mu_": self.mu_, "sigma_": self.sigma_}
