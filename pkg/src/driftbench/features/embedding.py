"""Text embedding providers.

The builtin :class:`HashingEmbedder` stands in for a contextual sentence
encoder: every token owns a fixed Gaussian vector derived from a stable hash
of the token, a text is the L2-normalized sum of its token vectors. Token
disjoint texts are therefore nearly orthogonal and shared vocabulary raises
similarity, which is the property the detectors rely on.
"""
from __future__ import annotations

import hashlib
import json
import urllib.error
import urllib.request
from functools import lru_cache

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .._text import tokenize

DEFAULT_DIM = 64


class EmbeddingError(RuntimeError):
    pass


def _unit(v):
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if not np.isfinite(norm) or norm == 0.0:
        raise EmbeddingError("cannot normalize a zero or non-finite vector")
    return v / norm


def null_vector(dim):
    """Reserved unit vector used for empty text."""
    e0 = np.zeros(dim)
    e0[0] = 1.0
    return e0


@lru_cache(maxsize=65536)
def _token_vector(token, dim, salt):
    digest = hashlib.blake2b(f"{salt}:{token}".encode("utf-8"), digest_size=8).digest()
    rng = np.random.default_rng(int.from_bytes(digest, "little"))
    v = rng.standard_normal(dim)
    v.flags.writeable = False
    return v


class HashingEmbedder(BaseEstimator, TransformerMixin):
    """Deterministic bag-of-hashed-tokens encoder (stateless transformer)."""

    def __init__(self, dim=DEFAULT_DIM, salt=0):
        self.dim = dim
        self.salt = salt

    def fit(self, X=None, y=None):
        return self

    def embed_one(self, text):
        tokens = tokenize(text)
        if not tokens:
            return null_vector(self.dim)
        acc = np.zeros(self.dim)
        for tok in tokens:
            acc += _token_vector(tok, self.dim, self.salt)
        norm = np.linalg.norm(acc)
        if norm == 0.0:
            return null_vector(self.dim)
        return acc / norm

    def embed_batch(self, texts):
        if not texts:
            return np.zeros((0, self.dim))
        return np.vstack([self.embed_one(t) for t in texts])

    def transform(self, X):
        return self.embed_batch(list(X))

    def describe(self):
        return {"kind": "hashing", "dim": self.dim, "salt": self.salt}


class HttpEmbedder:
    """Client for an external embedding service.

    ``GET {url}/info`` must answer ``{"dimension": d}``; ``POST {url}/embed``
    takes ``{"texts": [...]}`` and answers ``{"vectors": [[...], ...]}``.
    Returned vectors are L2-normalized here. Failures raise
    :class:`EmbeddingError`; there is no silent fallback.
    """

    def __init__(self, url, timeout=10.0):
        self.url = url.rstrip("/")
        self.timeout = timeout
        self._dim = None

    def _request(self, path, payload=None):
        data = None if payload is None else json.dumps(payload).encode("utf-8")
        req = urllib.request.Request(self.url + path, data=data,
                                     headers={"Content-Type": "application/json"},
                                     method="GET" if data is None else "POST")
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                if resp.status != 200:
                    raise EmbeddingError(f"{path}: HTTP {resp.status}")
                return json.loads(resp.read().decode("utf-8"))
        except (urllib.error.URLError, OSError, ValueError) as exc:
            raise EmbeddingError(f"embedding service {self.url}{path} failed: {exc}") from exc

    @property
    def dim(self):
        if self._dim is None:
            info = self._request("/info")
            try:
                self._dim = int(info["dimension"])
            except (KeyError, TypeError, ValueError):
                raise EmbeddingError("handshake response lacks an integer 'dimension'") from None
        return self._dim

    def embed_batch(self, texts):
        texts = list(texts)
        if not texts:
            return np.zeros((0, self.dim))
        body = self._request("/embed", {"texts": texts})
        try:
            vectors = np.asarray(body["vectors"], dtype=float)
        except (KeyError, TypeError, ValueError):
            raise EmbeddingError("response lacks a numeric 'vectors' array") from None
        if vectors.shape != (len(texts), self.dim):
            raise EmbeddingError(f"expected {(len(texts), self.dim)} vectors, got {vectors.shape}")
        return np.vstack([_unit(v) for v in vectors])

    def embed_one(self, text):
        return self.embed_batch([text])[0]

    def describe(self):
        return {"kind": "http", "url": self.url, "dim": self.dim}


_default = HashingEmbedder()


def embed(text, provider=None):
    provider = _default if provider is None else provider
    return provider.embed_one(text)


def cosine_similarity(u, v):
    return float(np.clip(np.dot(u, v), -1.0, 1.0))


def cosine_distance(u, v):
    """``1 - u.v`` for unit vectors, clipped to [0, 2]."""
    return float(np.clip(1.0 - np.dot(u, v), 0.0, 2.0))
