import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from driftbench._text import n_tokens, tokenize
from driftbench.anomaly import (
    ALPHA,
    DISTRACTOR_POOL,
    DURATIONS,
    FLAT_POOL,
    AnomalySpec,
    InjectionError,
    apply_flattening,
    apply_offtopic,
    inject,
    make_spec,
    modification_probability,
    sample_window,
    severity_at,
)
from driftbench.features import HashingEmbedder, cosine_distance, keyword_overlap, tone_features
from driftbench.features.lexicon import sentiment_lexicon
from driftbench.generation import ACTIONS, CHATTER, response_pool
from driftbench.persona import TriangularDelay, builtin_personas
from driftbench.prompts import CANONICAL_REMINDER, PROMPT_VARIANTS
from driftbench.simulator import run_simulation

P = {p.id: p for p in builtin_personas()}


def _speed(d):
    return next(s for s, (lo, hi) in DURATIONS.items() if lo <= d <= hi)


def _spec(start=20, d=6, alpha=5.0, kind="off_topic"):
    return AnomalySpec(kind, _speed(d), start, d, alpha, "t")


@pytest.mark.parametrize("speed, lo, hi", [("fast", 6, 8), ("medium", 10, 14), ("slow", 15, 20)])
def test_window_durations(speed, lo, hi):
    rng = np.random.default_rng(0)
    for _ in range(300):
        start, d = sample_window(speed, 60, rng)
        assert lo <= d <= hi
        assert 10 <= start and start + d <= 60


def test_infeasible_horizon():
    for speed in ("fast", "medium", "slow"):
        with pytest.raises(InjectionError):
            sample_window(speed, 5, np.random.default_rng(0))


def test_severity_worked_examples():
    assert severity_at(20, _spec(20, 6, 5.0)) == 1
    assert severity_at(23, _spec(20, 6, 5.0)) == 3
    assert severity_at(39, _spec(20, 20, 2.0)) == 3
    assert severity_at(19, _spec(20, 6, 5.0)) == 0
    assert severity_at(26, _spec(20, 6, 5.0)) == 0


def test_severity_exact_integer_ratio_not_rounded_up():
    # alpha*(t - t0)/d == 1 exactly -> ceil(1) + 1 = 2
    assert severity_at(23, _spec(20, 6, 2.0)) == 2


@settings(max_examples=200, deadline=None)
@given(start=st.integers(10, 40), d=st.sampled_from([6, 7, 8, 10, 12, 14, 15, 17, 20]))
def test_severity_monotone_and_saturating(start, d):
    spec = _spec(start, d, ALPHA[_speed(d)])
    sev = [severity_at(t, spec) for t in range(start, start + d)]
    assert sev[0] == 1
    assert all(b >= a for a, b in zip(sev, sev[1:]))
    assert all(1 <= s <= 3 for s in sev)


def test_modification_probabilities():
    assert modification_probability(1) == 0.4
    assert modification_probability(2) == 0.7
    assert modification_probability(3) == 0.95
    with pytest.raises(ValueError):
        modification_probability(0)


def test_flattening_severity_three_hits_flat_pool():
    out = apply_flattening("Yes, thank you so much! Done.", 3, rng=np.random.default_rng(0))
    assert out in FLAT_POOL
    lex = sentiment_lexicon()
    assert not any(lex.get(t, 0) > 0 for t in tokenize(out))


def _all_pool_texts():
    texts = set()
    for p in P.values():
        for rtype in ACTIONS:
            for tone in {p.tone_am, p.tone_pm}:
                texts.update(response_pool(rtype, p.expressiveness, p.modality, tone))
    return sorted(texts)


POOL_TEXTS = _all_pool_texts()


@settings(max_examples=300, deadline=None)
@given(idx=st.integers(0, len(POOL_TEXTS) - 1), sev=st.integers(1, 3), seed=st.integers(0, 2**31))
def test_flattening_never_raises_compound_or_length(idx, sev, seed):
    text = POOL_TEXTS[idx]
    out = apply_flattening(text, sev, rng=np.random.default_rng(seed))
    assert tone_features(out).compound_sentiment <= tone_features(text).compound_sentiment + 1e-12
    assert n_tokens(out) <= n_tokens(text)


@settings(max_examples=100, deadline=None)
@given(text=st.text(max_size=60), sev=st.integers(1, 3), seed=st.integers(0, 2**31))
def test_flattening_arbitrary_text(text, sev, seed):
    out = apply_flattening(text, sev, rng=np.random.default_rng(seed))
    assert tone_features(out).compound_sentiment <= tone_features(text).compound_sentiment + 1e-12


def test_flattening_shortens_with_severity():
    rng = np.random.default_rng(4)
    texts = [POOL_TEXTS[i] for i in rng.integers(len(POOL_TEXTS), size=1000)]
    len1 = np.mean([n_tokens(apply_flattening(t, 1, rng=rng)) for t in texts])
    len3 = np.mean([n_tokens(apply_flattening(t, 3, rng=rng)) for t in texts])
    assert len3 < len1


def test_distractor_pool_disjoint_from_prompts():
    reminder_texts = list(CANONICAL_REMINDER.values()) + [v for vs in PROMPT_VARIANTS.values() for v in vs]
    reminder_texts.append("take your medication")
    for d in DISTRACTOR_POOL:
        for r in reminder_texts:
            assert keyword_overlap(d, r) == 0.0, (d, r)


def test_distractors_not_on_reminder_topic():
    action_words = {t for rt in ACTIONS.values() for reg in rt.values() for a in reg for t in tokenize(a)}
    content = {"pills", "medication", "medicine", "tablets", "teeth", "shower", "appointment",
               "clinic", "doctor", "chores", "bins", "washing"}
    for d in DISTRACTOR_POOL:
        assert not (set(tokenize(d)) & content & action_words), d


def test_chatter_shares_vocabulary_with_distractors():
    chat = {t for c in CHATTER for t in tokenize(c)}
    dist = {t for d in DISTRACTOR_POOL for t in tokenize(d)}
    assert {"garden", "grandson"} <= chat & dist


def test_offtopic_severity_three_pure_distractor():
    out = apply_offtopic("Pills taken, thanks.", 3, "take your medication", np.random.default_rng(0))
    assert out in DISTRACTOR_POOL
    assert keyword_overlap(out, "take your medication") == 0.0


def test_offtopic_severity_one_keeps_overlap():
    prompt = "Time to take your medication."
    out = apply_offtopic("Medication taken, thanks.", 1, prompt, np.random.default_rng(0))
    assert keyword_overlap(out, prompt) > 0


def test_offtopic_voice_register_preserved():
    out = apply_offtopic("okay pills taken thank you", 2, None, np.random.default_rng(1))
    assert out == out.lower() and "." not in out


def test_offtopic_drift_grows_with_severity():
    emb = HashingEmbedder()
    rng = np.random.default_rng(7)
    texts = [POOL_TEXTS[i] for i in rng.integers(len(POOL_TEXTS), size=1000)]

    def mean_drift(sev):
        return np.mean([cosine_distance(emb.embed_one(t),
                                        emb.embed_one(apply_offtopic(t, sev, None, rng)))
                        for t in texts])

    assert mean_drift(3) > mean_drift(1)


def _log(pid=4, seed=0, horizon=60):
    return run_simulation(P[pid], horizon, seed)


def test_inject_preserves_structure_and_labels_only_changes():
    log = _log()
    spec = make_spec("off_topic", "medium", 60, np.random.default_rng(1))
    out = inject(log, spec, np.random.default_rng(2))
    assert out.anomaly_spec == spec
    assert len(out.records) == len(log.records)
    for a, b in zip(log.records, out.records):
        assert a.event == b.event and a.t_ack == b.t_ack and a.acknowledged == b.acknowledged
        assert a.modality == b.modality
        assert (b.anomaly_label is not None) == (a.response_text != b.response_text)
        if b.anomaly_label is not None:
            assert spec.t_start_day <= b.day < spec.end_day
            assert b.anomaly_label.severity == severity_at(b.day, spec)
    assert log.anomaly_spec is None


def test_inject_outside_window_never_labeled():
    spec = _spec(20, 6)
    out = inject(_log(), spec, np.random.default_rng(0), probabilities={1: 1.0, 2: 1.0, 3: 1.0})
    assert not any(r.anomaly_label for r in out.records if r.day == 10)


def test_inject_forced_probability_labels_every_window_record():
    spec = _spec(20, 6)
    out = inject(_log(), spec, np.random.default_rng(0), probabilities={1: 1.0, 2: 1.0, 3: 1.0})
    window = [r for r in out.records if r.acknowledged and spec.contains(r.day)]
    assert window and all(r.anomaly_label is not None for r in window)


def test_inject_deterministic():
    spec = _spec(30, 8, kind="flattened_sentiment")
    a = inject(_log(6), spec, np.random.default_rng(5), persona=P[6])
    b = inject(_log(6), spec, np.random.default_rng(5), persona=P[6])
    assert a == b


def test_inject_rejects_double_injection_and_bad_window():
    once = inject(_log(), _spec(20, 6), np.random.default_rng(0))
    with pytest.raises(InjectionError):
        inject(once, _spec(30, 6), np.random.default_rng(0))
    with pytest.raises(InjectionError):
        inject(_log(horizon=25), _spec(20, 8), np.random.default_rng(0))


def test_flatten_injection_lowers_tone_in_window():
    p = dataclasses.replace(P[4], delay_model=TriangularDelay(1, 10, 3))
    log = run_simulation(p, 60, 3)
    spec = _spec(30, 8, kind="flattened_sentiment")
    out = inject(log, spec, np.random.default_rng(0), persona=p)
    labeled = [(a, b) for a, b in zip(log.records, out.records) if b.anomaly_label]
    assert labeled
    for a, b in labeled:
        assert tone_features(b.response_text).compound_sentiment <= \
            tone_features(a.response_text).compound_sentiment
