"""Cumulative-sum charts for downward tone shifts and for semantic drift."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ..metrics import f1_from_flags
from .base import DetectionResult, check_series

THETA_GRID = np.linspace(0.01, 0.5, 50)


@dataclass(frozen=True)
class CusumFlattenParams:
    mu: float
    k: float = 0.5
    h: float = 3.0

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("slack k must be >= 0")
        if not self.h > 0:
            raise ValueError("threshold h must be > 0")


def cusum_flatten(series, params, reset_on_alarm=False):
    """Lower one-sided CUSUM: ``S_n = min(0, S_{n-1} + x_n - mu + k)``.

    A record is flagged when ``S_n < -h`` and scored ``-S_n``. With
    ``reset_on_alarm`` the statistic restarts from 0 after each flag, so a
    flag marks the records that themselves pushed the chart over the limit.
    """
    x = check_series(series)
    s, state = 0.0, np.empty_like(x)
    flags = np.zeros(x.shape, dtype=bool)
    for n, xn in enumerate(x):
        s = min(0.0, s + xn - params.mu + params.k)
        state[n] = s
        if s < -params.h:
            flags[n] = True
            if reset_on_alarm:
                s = 0.0
    return DetectionResult(-state, flags, "cusum", params.h, {"S": state})


def cusum_offtopic(drift_series, theta):
    """Upper CUSUM on drift, ``S_t = max(0, S_{t-1} + x_t - theta)``, flagged when ``S_t > theta``.

    The same ``theta`` is allowance and limit. Scores are the raw drift values.
    """
    x = check_series(drift_series, "drift_series")
    s, state = 0.0, np.empty_like(x)
    for t, xt in enumerate(x):
        s = max(0.0, s + xt - theta)
        state[t] = s
    return DetectionResult(x.copy(), state > theta, "cusum", float(theta), {"S": state})


def grid_search_theta(drift_series, labels, grid=THETA_GRID):
    """Theta from the grid maximizing F1 of the drift CUSUM; ties go to the smallest."""
    labels = np.asarray(labels, dtype=bool)
    best_theta, best_f1 = float(grid[0]), -1.0
    for theta in grid:
        score = f1_from_flags(cusum_offtopic(drift_series, theta).flags, labels)
        if score > best_f1:
            best_theta, best_f1 = float(theta), score
    return best_theta


class CusumFlattenDetector(BaseEstimator):
    """Baseline-relative lower CUSUM on a scalar tone series.

    ``fit`` takes the baseline mean from the first ``n_baseline`` values.
    """

    def __init__(self, k=0.5, h=3.0, n_baseline=10, reset_on_alarm=True):
        self.k = k
        self.h = h
        self.n_baseline = n_baseline
        self.reset_on_alarm = reset_on_alarm

    def fit(self, X, y=None):
        x = check_series(X)
        self.mu_ = float(np.mean(x[: self.n_baseline]))
        return self

    def detect(self, X):
        check_is_fitted(self, "mu_")
        return cusum_flatten(X, CusumFlattenParams(self.mu_, self.k, self.h), self.reset_on_alarm)

    def score_samples(self, X):
        return self.detect(X).scores

    def predict(self, X):
        return self.detect(X).flags

    def _state(self):
        return {"mu_": self.mu_}


class CusumDriftDetector(BaseEstimator):
    """Drift CUSUM; ``theta=None`` means pick it by grid search against the labels given to fit."""

    def __init__(self, theta=None):
        self.theta = theta

    def fit(self, X, y=None):
        x = check_series(X, "drift_series")
        if self.theta is not None:
            self.theta_ = float(self.theta)
        elif y is None or not np.any(y):
            raise ValueError("grid search for theta needs labels with at least one anomaly; "
                             "pass theta explicitly for unlabeled data")
        else:
            self.theta_ = grid_search_theta(x, y)
        return self

    def detect(self, X):
        check_is_fitted(self, "theta_")
        return cusum_offtopic(X, self.theta_)

    def score_samples(self, X):
        return self.detect(X).scores

    def predict(self, X):
        return self.detect(X).flags

    def _state(self):
        return {"theta_": self.theta_}
