"""GRU next-embedding forecaster with cosine prediction error as anomaly score.

Pure numpy, float64. A window of ``W`` embeddings is run through a single
GRU layer from a zero state; a linear head maps the last hidden state to the
predicted next embedding. Gradients are exact backpropagation through time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .base import DetectionResult

PARAM_NAMES = ("Wz", "Uz", "bz", "Wr", "Ur", "br", "Wh", "Uh", "bh", "V", "c")


def _sigmoid(a):
    return 0.5 * (1.0 + np.tanh(0.5 * a))


def init_params(input_dim, hidden, output_dim, rng):
    """Uniform init in +-1/sqrt(fan_in); biases start at zero."""
    def u(rows, fan_in):
        bound = 1.0 / math.sqrt(fan_in)
        return rng.uniform(-bound, bound, size=(rows, fan_in))

    p = {}
    for gate in "zrh":
        p[f"W{gate}"] = u(hidden, input_dim)
        p[f"U{gate}"] = u(hidden, hidden)
        p[f"b{gate}"] = np.zeros(hidden)
    p["V"] = u(output_dim, hidden)
    p["c"] = np.zeros(output_dim)
    return p


def forward(params, X):
    """Run windows ``X`` of shape ``(N, W, D)``; returns predictions and a cache."""
    N, W, _ = X.shape
    h = np.zeros((N, params["Uz"].shape[0]))
    steps = []
    for t in range(W):
        x = X[:, t, :]
        z = _sigmoid(x @ params["Wz"].T + h @ params["Uz"].T + params["bz"])
        r = _sigmoid(x @ params["Wr"].T + h @ params["Ur"].T + params["br"])
        rh = r * h
        hh = np.tanh(x @ params["Wh"].T + rh @ params["Uh"].T + params["bh"])
        steps.append((x, h, z, r, rh, hh))
        h = (1.0 - z) * h + z * hh
    y = h @ params["V"].T + params["c"]
    return y, (steps, h)


def loss_and_grads(params, X, T):
    """Mean over windows of ``0.5 * |y - target|^2`` and its exact gradient."""
    N = X.shape[0]
    y, (steps, h_last) = forward(params, X)
    diff = y - T
    loss = 0.5 * float(np.sum(diff * diff)) / N
    g = {k: np.zeros_like(v) for k, v in params.items()}
    dy = diff / N
    g["V"] = dy.T @ h_last
    g["c"] = dy.sum(axis=0)
    dh = dy @ params["V"]
    for x, h_prev, z, r, rh, hh in reversed(steps):
        da_h = dh * z * (1.0 - hh * hh)
        dz = dh * (hh - h_prev)
        dh_prev = dh * (1.0 - z)
        g["Wh"] += da_h.T @ x
        g["Uh"] += da_h.T @ rh
        g["bh"] += da_h.sum(axis=0)
        drh = da_h @ params["Uh"]
        dh_prev += drh * r
        da_r = drh * h_prev * r * (1.0 - r)
        da_z = dz * z * (1.0 - z)
        g["Wz"] += da_z.T @ x
        g["Uz"] += da_z.T @ h_prev
        g["bz"] += da_z.sum(axis=0)
        g["Wr"] += da_r.T @ x
        g["Ur"] += da_r.T @ h_prev
        g["br"] += da_r.sum(axis=0)
        dh = dh_prev + da_z @ params["Uz"] + da_r @ params["Ur"]
    return loss, g


def make_windows(seq, window, stop=None):
    """Pairs ``(seq[t-W:t], seq[t])`` for ``W <= t < stop``."""
    seq = np.asarray(seq, dtype=float)
    stop = len(seq) if stop is None else min(stop, len(seq))
    idx = np.arange(window, stop)
    if idx.size == 0:
        return np.zeros((0, window, seq.shape[1])), np.zeros((0, seq.shape[1])), idx
    X = np.stack([seq[t - window:t] for t in idx])
    return X, seq[idx], idx


def nearest_rank_percentile(values, q):
    values = np.sort(np.asarray(values, dtype=float))
    if values.size == 0:
        raise ValueError("percentile of an empty set")
    rank = max(1, math.ceil(q / 100.0 * values.size))
    return float(values[rank - 1])


def cosine_errors(pred, actual):
    pn = np.linalg.norm(pred, axis=1)
    an = np.linalg.norm(actual, axis=1)
    cos = np.sum(pred * actual, axis=1) / np.maximum(pn * an, 1e-12)
    return 1.0 - np.clip(cos, -1.0, 1.0)


@dataclass
class GruConfig:
    window: int = 5
    hidden_size: int = 64
    epochs: int = 50
    learning_rate: float = 0.05
    seed: int = 0
    percentile: float = 95.0


@dataclass
class GruModel:
    config: GruConfig
    params: dict
    threshold: float
    loss_history: list = field(default_factory=list)

    def predict_next(self, windows):
        return forward(self.params, windows)[0]


def gru_train(embedding_sequence, config=None, normal_prefix_len=None):
    """Fit on windows drawn from the presumed-normal prefix and set the 95th-percentile threshold."""
    config = GruConfig() if config is None else config
    seq = np.asarray(embedding_sequence, dtype=float)
    W = config.window
    if seq.ndim != 2 or len(seq) < W + 2:
        raise ValueError(f"GRU needs a sequence of at least {W + 2} embeddings, got {len(seq)}")
    prefix = len(seq) if normal_prefix_len is None else min(int(normal_prefix_len), len(seq))
    X, T, _ = make_windows(seq, W, prefix)
    if len(X) < 1:
        raise ValueError(f"normal prefix of {prefix} embeddings yields no training windows")
    rng = np.random.default_rng(config.seed)
    params = init_params(seq.shape[1], config.hidden_size, seq.shape[1], rng)
    history = []
    for _ in range(config.epochs):
        loss, grads = loss_and_grads(params, X, T)
        history.append(loss)
        for k in PARAM_NAMES:
            params[k] -= config.learning_rate * grads[k]
    history.append(loss_and_grads(params, X, T)[0])
    errors = cosine_errors(forward(params, X)[0], T)
    threshold = nearest_rank_percentile(errors, config.percentile)
    return GruModel(config, params, threshold, history)


def gru_score(model, embedding_sequence):
    """Cosine prediction error per position; the first ``W`` positions score 0 and are never flagged."""
    seq = np.asarray(embedding_sequence, dtype=float)
    X, T, idx = make_windows(seq, model.config.window)
    scores = np.zeros(len(seq))
    if len(X):
        scores[idx] = cosine_errors(model.predict_next(X), T)
    flags = np.zeros(len(seq), dtype=bool)
    flags[idx] = scores[idx] > model.threshold
    return DetectionResult(scores, flags, "gru", model.threshold)


class GruForecaster(BaseEstimator):
    def __init__(self, window=5, hidden_size=64, epochs=50, learning_rate=0.05,
                 random_state=0, percentile=95.0):
        self.window = window
        self.hidden_size = hidden_size
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.random_state = random_state
        self.percentile = percentile

    def _config(self):
        return GruConfig(self.window, self.hidden_size, self.epochs, self.learning_rate,
                         self.random_state, self.percentile)

    def fit(self, X, y=None, normal_prefix_len=None):
        self.model_ = gru_train(X, self._config(), normal_prefix_len)
        self.threshold_ = self.model_.threshold
        return self

    def detect(self, X):
        check_is_fitted(self, "model_")
        return gru_score(self.model_, X)

    def score_samples(self, X):
        return self.detect(X).scores

    def predict(self, X):
        return self.detect(X).flags

    def _state(self):
        return {"params": self.model_.params, "threshold": self.model_.threshold,
                "loss_history": self.model_.loss_history}

    def _load_state(self, state):
        params = {k: np.asarray(state["params"][k], dtype=float) for k in PARAM_NAMES}
        self.model_ = GruModel(self._config(), params, float(state["threshold"]),
                               list(state.get("loss_history", [])))
        self.threshold_ = self.model_.threshold
