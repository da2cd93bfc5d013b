"""Semantic relevance features of a response against its prompt and the user's baseline."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .._text import tokenize
from ..prompts import CANONICAL_REMINDER
from .embedding import HashingEmbedder, _unit, cosine_distance, cosine_similarity
from .lexicon import stopwords

BASELINE_RESPONSES = 10


class SemanticFeatures(NamedTuple):
    drift: float
    sim_prompt: float
    sim_reminder: float
    keyword_overlap: float


SEMANTIC_FEATURE_NAMES = SemanticFeatures._fields


def content_tokens(text):
    stop = stopwords()
    return {t for t in tokenize(text) if t not in stop}


def keyword_overlap(a_text, b_text):
    """Jaccard index of the stopword-filtered token sets; 0 when both are empty."""
    a, b = content_tokens(a_text), content_tokens(b_text)
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


def baseline_records(log, n=BASELINE_RESPONSES):
    """First ``n`` acknowledged records of a log."""
    return [r for r in log.records if r.acknowledged][:n]


class SemanticFeaturizer:
    """Computes semantic features for the records of one log.

    Embeddings are cached per text, so a featurizer is bound to one provider.
    """

    def __init__(self, log, provider=None, n_baseline=BASELINE_RESPONSES):
        self.log = log
        self.provider = HashingEmbedder() if provider is None else provider
        self.baseline = baseline_records(log, n_baseline)
        self._cache = {}

    def embed(self, text):
        v = self._cache.get(text)
        if v is None:
            v = self.provider.embed_one(text)
            self._cache[text] = v
        return v

    def prefetch(self, texts):
        missing = [t for t in dict.fromkeys(texts) if t not in self._cache]
        if missing:
            for t, v in zip(missing, self.provider.embed_batch(missing)):
                self._cache[t] = v

    def expected_response(self, record):
        if not self.baseline:
            raise ValueError("log has no acknowledged baseline responses")
        rtype = record.event.reminder_type
        pool = [r for r in self.baseline if r.event.reminder_type == rtype] or self.baseline
        centroid = np.sum([self.embed(r.response_text) for r in pool], axis=0)
        return _unit(centroid)

    def features(self, record):
        if not record.acknowledged:
            raise ValueError("semantic features need an acknowledged record")
        resp = self.embed(record.response_text)
        return SemanticFeatures(
            drift=cosine_distance(resp, self.expected_response(record)),
            sim_prompt=cosine_similarity(resp, self.embed(record.event.prompt_text)),
            sim_reminder=cosine_similarity(
                resp, self.embed(CANONICAL_REMINDER[record.event.reminder_type])),
            keyword_overlap=keyword_overlap(record.response_text, record.event.prompt_text),
        )

    def matrix(self, records=None):
        records = [r for r in (self.log.records if records is None else records) if r.acknowledged]
        texts = [r.response_text for r in records] + [r.event.prompt_text for r in records]
        self.prefetch(texts + list(CANONICAL_REMINDER.values()))
        return np.array([self.features(r) for r in records], dtype=float).reshape(-1, 4)


def expected_response_embedding(log, record, provider=None):
    return SemanticFeaturizer(log, provider).expected_response(record)


def semantic_features(log, record, provider=None):
    return SemanticFeaturizer(log, provider).features(record)
