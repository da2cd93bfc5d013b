"""One-class SVM with an RBF kernel, solved in the dual by pairwise coordinate descent.

Dual problem (nu-normalized)::

    minimize    1/2 a^T Q a
    subject to  0 <= a_i <= 1/(nu n),  sum(a) = 1,   Q_ij = exp(-gamma |x_i - x_j|^2)

Each step moves weight between the maximal KKT-violating pair, which keeps
the equality constraint and the box satisfied; iteration stops once the
violation drops below ``tol``. The decision function is
``f(x) = sum_i a_i K(x, x_i) - rho``; negative values are outliers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, OutlierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .base import DetectionResult

_FREE_EPS = 1e-12


def rbf_kernel(A, B, gamma):
    A = np.atleast_2d(A)
    B = np.atleast_2d(B)
    sq = (np.sum(A * A, axis=1)[:, None] + np.sum(B * B, axis=1)[None, :] - 2.0 * A @ B.T)
    return np.exp(-gamma * np.maximum(sq, 0.0))


@dataclass
class OcsvmModel:
    support_vectors: np.ndarray
    alpha: np.ndarray
    rho: float
    gamma: float
    nu: float
    n_iter: int = 0

    def decision_function(self, X):
        return rbf_kernel(np.atleast_2d(X), self.support_vectors, self.gamma) @ self.alpha - self.rho


def solve_dual(Q, upper, tol=1e-6, max_iter=100_000):
    """Minimize ``a^T Q a / 2`` over the capped simplex; returns ``(alpha, rho, n_iter)``."""
    n = Q.shape[0]
    alpha = np.zeros(n)
    full = int(np.floor(1.0 / upper + 1e-12))
    alpha[: min(full, n)] = upper
    if full < n:
        alpha[full] = 1.0 - upper * full
    grad = Q @ alpha
    it = 0
    for it in range(1, max_iter + 1):
        up = alpha < upper - _FREE_EPS
        low = alpha > _FREE_EPS
        if not up.any() or not low.any():
            break
        i = np.flatnonzero(up)[np.argmin(grad[up])]
        j = np.flatnonzero(low)[np.argmax(grad[low])]
        if grad[j] - grad[i] < tol:
            break
        curvature = max(Q[i, i] + Q[j, j] - 2.0 * Q[i, j], 1e-12)
        step = min((grad[j] - grad[i]) / curvature, upper - alpha[i], alpha[j])
        alpha[i] += step
        alpha[j] -= step
        grad += step * (Q[:, i] - Q[:, j])
    alpha = np.clip(alpha, 0.0, upper)
    grad = Q @ alpha
    free = (alpha > _FREE_EPS) & (alpha < upper - _FREE_EPS)
    if free.any():
        rho = float(np.mean(grad[free]))
    else:
        at_zero = alpha <= _FREE_EPS
        at_upper = ~at_zero
        hi = grad[at_zero].min() if at_zero.any() else grad.max()
        lo = grad[at_upper].max() if at_upper.any() else grad.min()
        rho = float((hi + lo) / 2.0)
    return alpha, rho, it


def ocsvm_train(X, nu=0.1, gamma=None, tol=1e-6, max_iter=100_000):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("one-class SVM needs a 2-d array with at least 2 rows")
    if not 0.0 < nu <= 1.0:
        raise ValueError("nu must lie in (0, 1]")
    gamma = 1.0 / X.shape[1] if gamma is None else float(gamma)
    if not gamma > 0:
        raise ValueError("gamma must be > 0")
    upper = 1.0 / (nu * X.shape[0])
    alpha, rho, it = solve_dual(rbf_kernel(X, X, gamma), upper, tol, max_iter)
    keep = alpha > _FREE_EPS
    return OcsvmModel(X[keep].copy(), alpha[keep], rho, gamma, nu, it)


def ocsvm_score(model, x):
    """Decision value ``f(x)``; the point is flagged when it is negative."""
    return model.decision_function(x)


class OneClassSVM(BaseEstimator, OutlierMixin):
    """Estimator wrapper; ``predict`` follows the sklearn convention (+1 inlier, -1 outlier)."""

    def __init__(self, nu=0.1, gamma=None, tol=1e-6, max_iter=100_000):
        self.nu = nu
        self.gamma = gamma
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None):
        X = check_array(X)
        self.model_ = ocsvm_train(X, self.nu, self.gamma, self.tol, self.max_iter)
        self.n_features_in_ = X.shape[1]
        return self

    @property
    def offset_(self):
        return self.model_.rho

    def decision_function(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return self.model_.decision_function(X)

    def score_samples(self, X):
        return self.decision_function(X) + self.model_.rho

    def predict(self, X):
        return np.where(self.decision_function(X) < 0, -1, 1)

    def detect(self, X):
        f = self.decision_function(X)
        return DetectionResult(-f, f < 0, "ocsvm", 0.0, {"decision": f})

    def _state(self):
        m = self.model_
        return {"support_vectors": m.support_vectors, "alpha": m.alpha, "rho": m.rho,
                "gamma": m.gamma, "nu": m.nu, "n_features_in_": self.n_features_in_}

    def _load_state(self, state):
        self.model_ = OcsvmModel(np.asarray(state["support_vectors"], float),
                                 np.asarray(state["alpha"], float), float(state["rho"]),
                                 float(state["gamma"]), float(state["nu"]))
        self.n_features_in_ = int(state["n_features_in_"])
