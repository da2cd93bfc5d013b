"""Progressive anomaly injection (flattened sentiment, off-topic drift)."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace

import numpy as np

from ._text import n_tokens, tokenize
from .features.tone import signed_contributions, tone_features
from .features.lexicon import subjectivity_lexicon

ANOMALY_TYPES = ("flattened_sentiment", "off_topic")
SPEEDS = ("slow", "medium", "fast")
DURATIONS = {"slow": (15, 20), "medium": (10, 14), "fast": (6, 8)}
ALPHA = {"slow": 2.0, "medium": 3.0, "fast": 5.0}
MIN_ONSET_DAY = 10
MODIFICATION_PROBABILITY = {1: 0.4, 2: 0.7, 3: 0.95}

FLAT_POOL = ("Done.", "Ok.", "Yes.", "Did it.", "Fine.", "Ok, done.", "Yes, done.", "Mm.")

# Replies about unrelated topics. No content word may occur in any prompt or
# canonical reminder text (checked by the test suite).
DISTRACTOR_POOL = (
    "The birds were singing in the garden all morning.",
    "My grandson plays football on Saturdays.",
    "We used to dance every Friday at the village hall.",
    "The sea was so blue when I was a girl.",
    "Has the postman brought the newspaper?",
    "I saw a red fox near the fence.",
    "My sister baked scones with strawberry jam.",
    "The old radio played songs from the war.",
    "Where are my knitting needles?",
    "Granddad kept pigeons behind the shed.",
    "There was snow on the hills last winter.",
    "The cat next door sleeps on the wall.",
    "The dog barked at the milkman again.",
    "Mother grew roses by the gate.",
    "The bus to town was late yesterday.",
    "I recall the summer fair with the brass band.",
)


class InjectionError(ValueError):
    pass


@dataclass(frozen=True)
class AnomalySpec:
    anomaly_type: str
    speed: str
    t_start_day: int
    duration_days: int
    alpha: float
    spec_id: str = "a0"

    def __post_init__(self):
        if self.anomaly_type not in ANOMALY_TYPES:
            raise ValueError(f"unknown anomaly_type {self.anomaly_type!r}")
        if self.speed not in SPEEDS:
            raise ValueError(f"unknown speed {self.speed!r}")
        lo, hi = DURATIONS[self.speed]
        if not lo <= self.duration_days <= hi:
            raise ValueError(f"{self.speed} anomalies last {lo}-{hi} days, got {self.duration_days}")
        if self.t_start_day < 0:
            raise ValueError("t_start_day must be >= 0")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    @property
    def end_day(self):
        """First day after the window."""
        return self.t_start_day + self.duration_days

    def contains(self, day):
        return self.t_start_day <= day < self.end_day

    def to_dict(self):
        return {"anomaly_type": self.anomaly_type, "speed": self.speed,
                "t_start_day": self.t_start_day, "duration_days": self.duration_days,
                "alpha": self.alpha, "spec_id": self.spec_id}

    @classmethod
    def from_dict(cls, d):
        return cls(d["anomaly_type"], d["speed"], int(d["t_start_day"]), int(d["duration_days"]),
                   float(d["alpha"]), d.get("spec_id", "a0"))


@dataclass(frozen=True)
class AnomalyLabel:
    anomaly_type: str
    severity: int
    spec_ref: str

    def __post_init__(self):
        if self.severity not in (1, 2, 3):
            raise ValueError("severity must be 1, 2 or 3")

    def to_dict(self):
        return {"anomaly_type": self.anomaly_type, "severity": self.severity,
                "spec_ref": self.spec_ref}

    @classmethod
    def from_dict(cls, d):
        return cls(d["anomaly_type"], int(d["severity"]), d["spec_ref"])


def sample_window(speed, horizon_days, rng):
    lo, hi = DURATIONS[speed]
    if horizon_days < MIN_ONSET_DAY + hi:
        raise InjectionError(f"horizon of {horizon_days} days cannot hold a {speed} window "
                             f"(needs {MIN_ONSET_DAY + hi})")
    d = int(rng.integers(lo, hi + 1))
    t_start = int(rng.integers(MIN_ONSET_DAY, horizon_days - d + 1))
    return t_start, d


def make_spec(anomaly_type, speed, horizon_days, rng, alpha=None, spec_id="a0"):
    t_start, d = sample_window(speed, horizon_days, rng)
    return AnomalySpec(anomaly_type, speed, t_start, d, ALPHA[speed] if alpha is None else alpha,
                       spec_id)


def severity_at(t_day, spec):
    if not spec.contains(t_day):
        return 0
    # the epsilon keeps exact integer ratios from rounding up through float error
    ratio = spec.alpha * (t_day - spec.t_start_day) / spec.duration_days
    return min(3, math.ceil(ratio - 1e-12) + 1)


def modification_probability(severity, table=None):
    table = MODIFICATION_PROBABILITY if table is None else table
    if severity not in (1, 2, 3):
        raise ValueError("severity must be 1, 2 or 3")
    return table[severity]


# --------------------------------------------------------------------------
# rewriting

def _looks_voice(text):
    return text == text.lower() and not re.search(r"[.,!?;:]", text)


def _voice(text):
    kept = "".join(ch if ch.isalnum() or ch in " '" else " " for ch in text.lower())
    return " ".join(kept.split())


def _drop_words(text, drop):
    """Remove whitespace-separated words whose token satisfies ``drop``."""
    kept = []
    for word in text.split():
        toks = tokenize(word)
        if toks and drop(toks[0]):
            continue
        kept.append(word)
    out = " ".join(kept).replace("!", "")
    out = re.sub(r"\s+([,.;:?])", r"\1", out)
    out = re.sub(r"([,;:])(?=[,.;:]|$)", "", out)
    return out.strip(" ,;:-")


def _truncate(text, max_tokens):
    words, count, out = text.split(), 0, []
    for word in words:
        if tokenize(word):
            count += 1
        if count > max_tokens:
            break
        out.append(word)
    return " ".join(out).rstrip(" ,;:-")


def _flat_choice(text, rng, voice):
    limit = max(1, n_tokens(text))
    options = [t for t in FLAT_POOL if n_tokens(t) <= limit]
    choice = options[int(rng.integers(len(options)))]
    return _voice(choice) if voice else choice


def _keep_affect_only(text):
    """Strip affect-neutral words but keep lexicon words, negators and exclamations."""
    tokens = tokenize(text)
    affect = {tokens[i] for i, _ in signed_contributions(tokens)}
    kept = [w for w in text.split()
            if tokenize(w) and (tokenize(w)[0] in affect or tokenize(w)[0] in
                                ("not", "no", "never") or tokenize(w)[0].endswith("n't"))]
    out = " ".join(kept)
    return out + "!" * min(text.count("!"), 3) if "!" in text else out


def _is_flatter(candidate, original):
    if not candidate or not tokenize(candidate):
        return False
    if n_tokens(candidate) > n_tokens(original):
        return False
    return tone_features(candidate).compound_sentiment <= tone_features(original).compound_sentiment + 1e-12


def apply_flattening(text, severity, persona=None, rng=None):
    """Reduce affect and verbosity; stronger for higher severity.

    Severity 1 drops exclamations and about half of the positive/subjective
    words, severity 2 drops all of them and halves the length, severity 3
    replaces the reply with a bare acknowledgment. The result never carries
    a higher compound sentiment or more tokens than the input; when no such
    rewrite exists the input is returned unchanged.
    """
    if severity < 1:
        raise ValueError("severity must be >= 1")
    rng = np.random.default_rng() if rng is None else rng
    voice = persona.modality == "voice" if persona is not None else _looks_voice(text)
    tokens = tokenize(text)
    positive = {tokens[i] for i, s in signed_contributions(tokens) if s > 0}
    subjective = {t for t in tokens if t in subjectivity_lexicon()}
    affect = positive | subjective

    candidates = []
    if severity == 1:
        ordered = sorted(affect)
        coin = {t: rng.random() < 0.5 for t in ordered}
        if ordered and not any(coin.values()):
            coin[ordered[int(rng.integers(len(ordered)))]] = True
        candidates.append(_drop_words(text, lambda t: coin.get(t, False)))
    elif severity == 2:
        stripped = _drop_words(text, lambda t: t in affect)
        candidates.append(_truncate(stripped, max(1, math.ceil(len(tokens) / 2))))
    candidates.append(_flat_choice(text, rng, voice))
    candidates.append(_keep_affect_only(text))
    for cand in candidates:
        if cand != text and _is_flatter(cand, text):
            return cand
    return text


def apply_offtopic(text, severity, prompt_text=None, rng=None):
    """Replace or dilute a reply with unrelated content.

    Severity 1 appends the first half of an unrelated sentence to the reply,
    severity 2 keeps only the opening third of the reply before a full
    unrelated sentence, severity 3 is the unrelated sentence alone.
    """
    if severity < 1:
        raise ValueError("severity must be >= 1")
    rng = np.random.default_rng() if rng is None else rng
    distractor = DISTRACTOR_POOL[int(rng.integers(len(DISTRACTOR_POOL)))]
    if _looks_voice(text):
        distractor = _voice(distractor)
    if severity >= 3:
        return distractor
    if severity == 2:
        head = _truncate(text, max(1, math.ceil(n_tokens(text) / 3)))
        return f"{head} {distractor}".strip()
    words = distractor.split()
    half = " ".join(words[: math.ceil(len(words) / 2)]).rstrip(" ,.?!")
    return f"{text} {half}".strip()


# --------------------------------------------------------------------------
# log-level injection

def inject(log, spec, rng, probabilities=None, persona=None):
    """Return a labeled copy of ``log``; the input log is left untouched.

    Each acknowledged record inside the window is rewritten with probability
    ``modification_probability(severity_at(day))``. Only records whose text
    actually changed receive a label.
    """
    if spec.end_day > log.horizon_days:
        raise InjectionError(f"window [{spec.t_start_day}, {spec.end_day}) exceeds horizon "
                             f"{log.horizon_days}")
    if log.anomaly_spec is not None or any(r.anomaly_label is not None for r in log.records):
        raise InjectionError("log already carries an injected anomaly")
    records = []
    for rec in log.records:
        sev = severity_at(rec.day, spec) if rec.acknowledged else 0
        if sev == 0:
            records.append(rec)
            continue
        hit = rng.random() < modification_probability(sev, probabilities)
        text = rec.response_text
        if hit:
            if spec.anomaly_type == "flattened_sentiment":
                text = apply_flattening(rec.response_text, sev, persona, rng)
            else:
                text = apply_offtopic(rec.response_text, sev, rec.event.prompt_text, rng)
        if hit and text != rec.response_text:
            rec = replace(rec, response_text=text,
                          anomaly_label=AnomalyLabel(spec.anomaly_type, sev, spec.spec_id))
        records.append(rec)
    return log.with_records(records, anomaly_spec=spec)
