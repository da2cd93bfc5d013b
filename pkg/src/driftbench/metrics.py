"""Per-record detection metrics: F1, detection delay, ROC AUC."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

AUC_AGREEMENT = 1e-9


class ConfusionCounts(NamedTuple):
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def precision(self):
        return self.tp / (self.tp + self.fp) if self.tp else 0.0

    @property
    def recall(self):
        return self.tp / (self.tp + self.fn) if self.tp else 0.0


def confusion(flags, labels):
    flags = np.asarray(flags, dtype=bool)
    labels = np.asarray(labels, dtype=bool)
    if flags.shape != labels.shape:
        raise ValueError("flags and labels differ in shape")
    return ConfusionCounts(int(np.sum(flags & labels)), int(np.sum(flags & ~labels)),
                           int(np.sum(~flags & labels)), int(np.sum(~flags & ~labels)))


def f1(counts):
    """Harmonic mean of precision and recall; 0 when there are no true positives."""
    if counts.tp == 0:
        return 0.0
    p, r = counts.precision, counts.recall
    return 2 * p * r / (p + r)


def f1_from_flags(flags, labels):
    return f1(confusion(flags, labels))


@dataclass(frozen=True)
class DelayResult:
    mean_days: Optional[float]
    detected: int
    episodes: int
    delays: tuple = ()


def detection_delay(episodes, record_days, flags):
    """Mean days from onset to the first flag inside each episode window.

    ``episodes`` holds ``(onset_day, end_day)`` pairs with ``end_day``
    exclusive. Episodes without a flag in their window are left out of the
    mean; with none detected the mean is ``None``.
    """
    days = np.asarray(record_days)
    flags = np.asarray(flags, dtype=bool)
    delays = []
    for onset, end in episodes:
        hits = days[flags & (days >= onset) & (days < end)]
        if hits.size:
            delays.append(float(hits.min() - onset))
    mean = float(np.mean(delays)) if delays else None
    return DelayResult(mean, len(delays), len(episodes), tuple(delays))


def _split_scores(scores, labels):
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=bool)
    if scores.shape != labels.shape:
        raise ValueError("scores and labels differ in shape")
    pos, neg = scores[labels], scores[~labels]
    if pos.size == 0 or neg.size == 0:
        raise ValueError("ROC AUC needs both classes")
    return pos, neg


def roc_auc_pairwise(scores, labels):
    """P(score+ > score-) + P(tie)/2 by counting all positive/negative pairs."""
    pos, neg = _split_scores(scores, labels)
    diff = pos[:, None] - neg[None, :]
    return float((np.sum(diff > 0) + 0.5 * np.sum(diff == 0)) / diff.size)


def roc_auc_trapezoid(scores, labels):
    """Area under the ROC polyline swept over all distinct thresholds."""
    pos, neg = _split_scores(scores, labels)
    scores = np.concatenate([pos, neg])
    labels = np.concatenate([np.ones(pos.size, bool), np.zeros(neg.size, bool)])
    order = np.argsort(-scores, kind="mergesort")
    s, y = scores[order], labels[order]
    last_of_group = np.r_[np.nonzero(np.diff(s))[0], s.size - 1]
    tps = np.cumsum(y)[last_of_group]
    fps = np.cumsum(~y)[last_of_group]
    tpr = np.r_[0.0, tps / pos.size]
    fpr = np.r_[0.0, fps / neg.size]
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def roc_auc(scores, labels):
    pairwise = roc_auc_pairwise(scores, labels)
    sweep = roc_auc_trapezoid(scores, labels)
    if abs(pairwise - sweep) > AUC_AGREEMENT:
        raise ArithmeticError(f"ROC AUC routes disagree: pairwise {pairwise!r} vs sweep {sweep!r}")
    return pairwise
