"""Class-weighted logistic regression trained by backtracking gradient descent."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y


def sigmoid(a):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(a, dtype=float)))


def balanced_weights(y):
    """``n / (2 * n_class)`` for each of the two classes."""
    y = np.asarray(y, dtype=int)
    n = y.size
    return {c: n / (2.0 * np.sum(y == c)) for c in (0, 1)}


def _objective(w, b, X, y, sw, l2):
    a = X @ w + b
    # log(1 + e^a) - y a, stable for large |a|
    ce = np.logaddexp(0.0, a) - y * a
    loss = float(np.sum(sw * ce) / y.size + 0.5 * l2 * (w @ w))
    resid = sw * (sigmoid(a) - y) / y.size
    return loss, X.T @ resid + l2 * w, float(np.sum(resid))


class LogisticRegression(BaseEstimator, ClassifierMixin):
    """Binary logistic model ``P(y=1|x) = sigmoid(w.x + b)`` with optional balanced class weights.

    Minimizes the weighted mean cross-entropy plus ``l2/2 * |w|^2`` (bias not
    penalized). Steps are accepted only when they satisfy the Armijo
    condition, so the training loss never increases between accepted steps.
    """

    def __init__(self, balanced=True, l2=1e-3, tol=1e-6, max_iter=5000):
        self.balanced = balanced
        self.l2 = l2
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        y = np.asarray(y).astype(int)
        if set(np.unique(y)) != {0, 1}:
            raise ValueError("logistic training needs both classes 0 and 1")
        cw = balanced_weights(y) if self.balanced else {0: 1.0, 1: 1.0}
        sw = np.where(y == 1, cw[1], cw[0])
        w, b = np.zeros(X.shape[1]), 0.0
        loss, gw, gb = _objective(w, b, X, y, sw, self.l2)
        history, step, n_iter = [loss], 1.0, 0
        for n_iter in range(1, self.max_iter + 1):
            gnorm2 = float(gw @ gw + gb * gb)
            if np.sqrt(gnorm2) < self.tol:
                break
            while True:
                w_new, b_new = w - step * gw, b - step * gb
                new_loss, new_gw, new_gb = _objective(w_new, b_new, X, y, sw, self.l2)
                if new_loss <= loss - 1e-4 * step * gnorm2 or step < 1e-12:
                    break
                step *= 0.5
            if new_loss > loss:
                break
            w, b, loss, gw, gb = w_new, b_new, new_loss, new_gw, new_gb
            history.append(loss)
            step *= 2.0
        self.coef_ = w
        self.intercept_ = b
        self.class_weight_ = cw
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = X.shape[1]
        self.loss_history_ = history
        self.n_iter_ = n_iter
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return X @ self.coef_ + self.intercept_

    def predict_proba(self, X):
        p = sigmoid(self.decision_function(X))
        return np.column_stack([1.0 - p, p])

    def predict(self, X):
        return (self.predict_proba(X)[:, 1] >= 0.5).astype(int)

    def _state(self):
        return {"coef_": self.coef_, "intercept_": self.intercept_,
                "n_features_in_": self.n_features_in_,
                "class_weight_": {str(k): v for k, v in self.class_weight_.items()}}

    def _load_state(self, state):
        self.coef_ = np.asarray(state["coef_"], dtype=float)
        self.intercept_ = float(state["intercept_"])
        self.n_features_in_ = int(state["n_features_in_"])
        self.class_weight_ = {int(k): float(v) for k, v in state["class_weight_"].items()}
        self.classes_ = np.array([0, 1])


def logreg_train(X, y, balanced=True):
    return LogisticRegression(balanced=balanced).fit(X, y)


def logreg_predict(model, x):
    """Probability of the positive class for one vector or a matrix of rows."""
    x = np.asarray(x, dtype=float)
    p = model.predict_proba(np.atleast_2d(x))[:, 1]
    return float(p[0]) if x.ndim == 1 else p
