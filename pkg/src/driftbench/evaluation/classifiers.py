"""Personalized (per-user split) vs generalized (leave-one-user-out) logistic classifiers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from sklearn.model_selection import train_test_split

from ..detectors.logreg import LogisticRegression
from ..metrics import f1_from_flags, roc_auc
from .pipeline import LogView

TEST_FRACTION = 0.3


@dataclass
class ClassifierOutcome:
    persona_id: int
    f1: Optional[float]
    roc_auc: Optional[float]
    n_train: int = 0
    n_test: int = 0
    evaluable: bool = True
    reason: str = ""
    event_ids: list = field(default_factory=list)
    probabilities: list = field(default_factory=list)
    labels: list = field(default_factory=list)


def embed_view(view, provider):
    return provider.embed_batch(view.texts)


def _outcome(persona_id, model, view, idx, X, n_train):
    y = view.labels[idx].astype(int)
    p = model.predict_proba(X)[:, 1]
    auc = roc_auc(p, y) if 0 < y.sum() < y.size else None
    return ClassifierOutcome(persona_id, f1_from_flags(p >= 0.5, y.astype(bool)), auc,
                             n_train, len(idx), event_ids=[view.records[i].event.event_id for i in idx],
                             probabilities=p.tolist(), labels=y.tolist())


def stratified_split(y, seed, test_size=TEST_FRACTION):
    idx = np.arange(len(y))
    return train_test_split(idx, test_size=test_size, stratify=y, random_state=seed)


def personalized_eval(view, X, persona_id, seed=0):
    y = view.labels.astype(int)
    if min(y.sum(), (1 - y).sum()) < 2:
        return ClassifierOutcome(persona_id, None, None, evaluable=False,
                                 reason="each class needs at least two records")
    train, test = stratified_split(y, seed)
    model = LogisticRegression(balanced=True).fit(X[train], y[train])
    return _outcome(persona_id, model, view, np.sort(test), X[np.sort(test)], len(train))


def downsample_balanced(y, rng):
    """Indices keeping every minority record and an equal-size random draw of the majority."""
    pos, neg = np.flatnonzero(y == 1), np.flatnonzero(y == 0)
    minority, majority = (pos, neg) if len(pos) <= len(neg) else (neg, pos)
    keep = rng.choice(majority, size=len(minority), replace=False)
    return np.sort(np.concatenate([minority, keep]))


def generalized_eval(views, matrices, persona_ids, seed=0):
    """Leave-one-user-out: train on every other user (downsampled to 1:1), test on the held-out one."""
    if len(views) < 2:
        raise ValueError("leave-one-user-out needs at least two users")
    out = []
    for k, pid in enumerate(persona_ids):
        others = [i for i in range(len(views)) if i != k]
        X = np.vstack([matrices[i] for i in others])
        y = np.concatenate([views[i].labels for i in others]).astype(int)
        y_test = views[k].labels.astype(int)
        if y.sum() == 0 or y.sum() == y.size or y_test.sum() == 0:
            out.append(ClassifierOutcome(pid, None, None, evaluable=False,
                                         reason="a class is missing from the train or test side"))
            continue
        rng = np.random.default_rng(np.random.SeedSequence([seed, pid, 7]))
        keep = downsample_balanced(y, rng)
        model = LogisticRegression(balanced=True).fit(X[keep], y[keep])
        out.append(_outcome(pid, model, views[k], np.arange(len(y_test)), matrices[k], len(keep)))
    return out


def classifier_views(logs, provider):
    views = [LogView.of(log) for log in logs]
    return views, [embed_view(v, provider) for v in views]
