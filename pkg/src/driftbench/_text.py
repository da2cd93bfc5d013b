"""Tokenization shared by the generator, injector and feature extractors."""
import re

_TOKEN_RE = re.compile(r"[a-z0-9']+")


def tokenize(text):
    """Lowercase word tokens; punctuation is dropped, inner apostrophes kept."""
    if not text:
        return []
    tokens = (t.strip("'") for t in _TOKEN_RE.findall(text.lower()))
    return [t for t in tokens if t]


def n_tokens(text):
    return len(tokenize(text))
