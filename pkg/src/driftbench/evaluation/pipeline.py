"""Single-log pipelines: generate a labeled log, extract features, run one detector, score it."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..anomaly import SPEEDS, inject, make_spec
from ..detectors import (
    CusumDriftDetector,
    CusumFlattenDetector,
    EwmaDetector,
    GruForecaster,
    OneClassSVM,
)
from ..features import BaselineStats, HashingEmbedder, SemanticFeaturizer, composite_tone_index
from ..features.tone import ToneFeatureExtractor
from ..metrics import detection_delay, f1_from_flags, roc_auc
from ..simulator import persona_rng, run_simulation

TASKS = ("flattened_sentiment", "off_topic")
FLATTEN_METHODS = ("cusum", "ewma", "ocsvm")
OFFTOPIC_METHODS = ("cusum", "gru", "ocsvm")
TASK_METHODS = {"flattened_sentiment": FLATTEN_METHODS, "off_topic": OFFTOPIC_METHODS}
TONE_BASELINE_RESPONSES = 10
OCSVM_TRAIN_DAYS = 10
GRU_PREFIX_DAYS = 15


class MethodTaskMismatch(ValueError):
    pass


def injection_rng(seed, persona_id, task, speed):
    return persona_rng(seed, persona_id, 1 + TASKS.index(task), SPEEDS.index(speed))


def labeled_log(persona, task, speed, seed, horizon_days=60, generator=None, inject_anomaly=True):
    """Simulated log for ``persona`` with one injected anomaly of ``task`` at ``speed``."""
    log = run_simulation(persona, horizon_days, seed, generator)
    rng = injection_rng(seed, persona.id, task, speed)
    spec = make_spec(task, speed, horizon_days, rng, spec_id=f"{task}-{speed}")
    if not inject_anomaly:
        # control run: same draws, nothing injected, no episode to find
        return log
    return inject(log, spec, rng, persona=persona)


@dataclass
class LogView:
    """Acknowledged records of a log as aligned arrays."""

    records: list
    labels: np.ndarray
    days: np.ndarray
    texts: list
    episodes: list = field(default_factory=list)

    @classmethod
    def of(cls, log):
        recs = [r for r in log.records if r.acknowledged]
        spec = log.anomaly_spec
        episodes = [] if spec is None else [(spec.t_start_day, spec.end_day)]
        return cls(recs, np.array([r.anomaly_label is not None for r in recs], dtype=bool),
                   np.array([r.day for r in recs], dtype=int),
                   [r.response_text for r in recs], episodes)


@dataclass
class MethodOutcome:
    method: str
    scores: np.ndarray
    flags: np.ndarray
    threshold: float
    f1: float
    delay_days: Optional[float] = None
    detected: int = 0
    episodes: int = 0
    roc_auc: Optional[float] = None
    scored: Optional[np.ndarray] = None


def _auc_or_none(scores, labels):
    if labels.all() or not labels.any():
        return None
    return roc_auc(scores, labels)


# --------------------------------------------------------------------------
# flattened sentiment

def tone_matrix(view):
    return ToneFeatureExtractor().transform(view.texts)


def run_flatten_method(view, method, params=None, tone=None):
    params = dict(params or {})
    if method not in FLATTEN_METHODS:
        raise MethodTaskMismatch(f"method {method!r} does not apply to flattened sentiment "
                                 f"(choose from {', '.join(FLATTEN_METHODS)})")
    F = tone_matrix(view) if tone is None else tone
    n_base = TONE_BASELINE_RESPONSES
    if len(F) < n_base:
        raise ValueError(f"need at least {n_base} acknowledged responses, got {len(F)}")
    if method in ("cusum", "ewma"):
        stats = BaselineStats.from_samples(F[:n_base])
        series = composite_tone_index(F, stats)
        det = CusumFlattenDetector(**params) if method == "cusum" else EwmaDetector(**params)
        res = det.fit(series).detect(series)
    else:
        train = view.days < OCSVM_TRAIN_DAYS
        if train.sum() < 2:
            raise ValueError("one-class SVM needs at least 2 responses in its training days")
        stats = BaselineStats.from_samples(F[train])
        Z = (F - stats.mean) / stats.scale
        res = OneClassSVM(**params).fit(Z[train]).detect(Z)
    delay = detection_delay(view.episodes, view.days, res.flags)
    return MethodOutcome(method, res.scores, res.flags, res.threshold,
                         f1_from_flags(res.flags, view.labels), delay.mean_days,
                         delay.detected, delay.episodes)


# --------------------------------------------------------------------------
# off-topic drift

def run_offtopic_method(log, view, method, params=None, provider=None, featurizer=None):
    params = dict(params or {})
    if method not in OFFTOPIC_METHODS:
        raise MethodTaskMismatch(f"method {method!r} does not apply to off-topic detection "
                                 f"(choose from {', '.join(OFFTOPIC_METHODS)})")
    provider = HashingEmbedder() if provider is None else provider
    feat = SemanticFeaturizer(log, provider) if featurizer is None else featurizer
    scored = np.ones(len(view.records), dtype=bool)
    if method == "cusum":
        drift = feat.matrix(view.records)[:, 0]
        det = CusumDriftDetector(**params).fit(drift, view.labels)
        res = det.detect(drift)
    elif method == "gru":
        feat.prefetch(view.texts)
        E = np.vstack([feat.embed(t) for t in view.texts]) if view.texts else np.zeros((0, 1))
        prefix = int(np.sum(view.days < GRU_PREFIX_DAYS))
        det = GruForecaster(**params)
        det.fit(E, normal_prefix_len=prefix)
        res = det.detect(E)
        scored[: det.window] = False
    else:
        S = feat.matrix(view.records)
        train = view.days < OCSVM_TRAIN_DAYS
        if train.sum() < 2:
            raise ValueError("one-class SVM needs at least 2 responses in its training days")
        stats = BaselineStats.from_samples(S[train])
        Z = (S - stats.mean) / stats.scale
        res = OneClassSVM(**params).fit(Z[train]).detect(Z)
    labels = view.labels[scored]
    return MethodOutcome(method, res.scores, res.flags, res.threshold,
                         f1_from_flags(res.flags[scored], labels),
                         roc_auc=_auc_or_none(res.scores[scored], labels), scored=scored)


def run_method(log, task, method, params=None, provider=None):
    view = LogView.of(log)
    if task == "flattened_sentiment":
        return view, run_flatten_method(view, method, params)
    return view, run_offtopic_method(log, view, method, params, provider)
