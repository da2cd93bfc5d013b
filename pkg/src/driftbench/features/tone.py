"""Surface affective-tone features: lexicon sentiment, polarity, subjectivity, length."""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .._text import tokenize
from .lexicon import sentiment_lexicon, subjectivity_lexicon

NEGATORS = frozenset({"not", "no", "never", "none", "nobody", "nothing", "neither", "nor",
                      "without", "cannot"})
NEGATION_SCOPE = 3
EXCLAMATION_BOOST = 0.1
MAX_EXCLAMATION_BOOST = 0.3
LENGTH_CAP = 30


class ToneFeatures(NamedTuple):
    compound_sentiment: float
    polarity: float
    subjectivity: float
    norm_length: float


TONE_FEATURE_NAMES = ToneFeatures._fields


def _is_negator(token):
    return token in NEGATORS or token.endswith("n't")


def signed_contributions(tokens, lexicon=None):
    """Per-token lexicon scores after negation, as ``(index, score)`` pairs."""
    lexicon = sentiment_lexicon() if lexicon is None else lexicon
    out = []
    for i, tok in enumerate(tokens):
        score = lexicon.get(tok)
        if score is None:
            continue
        if any(_is_negator(t) for t in tokens[max(0, i - NEGATION_SCOPE):i]):
            score = -score
        out.append((i, score))
    return out


def tone_features(text):
    tokens = tokenize(text)
    if not tokens:
        return ToneFeatures(0.0, 0.0, 0.0, 0.0)
    scores = [s for _, s in signed_contributions(tokens)]
    raw = sum(scores)
    boost = min(text.count("!") * EXCLAMATION_BOOST, MAX_EXCLAMATION_BOOST)
    if raw > 0:
        raw += boost
    elif raw < 0:
        raw -= boost
    compound = raw / math.sqrt(raw * raw + 1.0)
    polarity = sum(scores) / len(scores) if scores else 0.0
    subj = subjectivity_lexicon()
    subjectivity = sum(1 for t in tokens if t in subj) / len(tokens)
    norm_length = min(1.0, len(tokens) / LENGTH_CAP)
    return ToneFeatures(compound, polarity, subjectivity, norm_length)


class ToneFeatureExtractor(BaseEstimator, TransformerMixin):
    """Maps an iterable of texts to an ``(n, 4)`` tone-feature matrix."""

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        return np.array([tone_features(t) for t in X], dtype=float).reshape(-1, 4)

    def get_feature_names_out(self, input_features=None):
        return np.array(TONE_FEATURE_NAMES, dtype=object)
