"""Bundled sentiment/subjectivity lexicons and stopword list."""
from functools import lru_cache
from importlib import resources


def _data_path(name):
    return resources.files("driftbench.features").joinpath("data", name)


def read_tsv_lexicon(path):
    """Parse ``token<TAB>score`` lines; blank lines and ``#`` comments are skipped."""
    lexicon = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            try:
                token, score = line.split("\t")
                lexicon[token.lower()] = float(score)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: expected 'token<TAB>score'") from None
    return lexicon


@lru_cache(maxsize=None)
def sentiment_lexicon():
    return read_tsv_lexicon(_data_path("sentiment.tsv"))


@lru_cache(maxsize=None)
def subjectivity_lexicon():
    return read_tsv_lexicon(_data_path("subjectivity.tsv"))


@lru_cache(maxsize=None)
def stopwords():
    text = _data_path("stopwords.txt").read_text(encoding="utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())
