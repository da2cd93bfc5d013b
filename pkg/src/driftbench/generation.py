"""Response text generation.

The builtin generator composes replies from fixed template pools. A pool
cell is keyed by ``(reminder_type, expressiveness, modality, tone)``; each
template is expanded with every action phrase of the reminder type, so a
cell holds at least eight distinct replies. External generators speak a
small JSON-over-HTTP protocol and fall back to the builtin on failure.
"""
from __future__ import annotations

import json
import urllib.error
import urllib.request
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Protocol

import numpy as np

from .persona import PM_BOUNDARY

# Action phrases per reminder type. "short" serves low-expressiveness styles.
ACTIONS = {
    "medication": {
        "short": ("pills taken", "took them", "medication taken", "took my pills"),
        "long": ("I took my pills with breakfast", "my medication is taken",
                 "I've had my tablets with water", "took my medicine just now"),
    },
    "hygiene": {
        "short": ("teeth brushed", "washed up", "showered", "all washed"),
        "long": ("I brushed my teeth and washed", "had my shower already",
                 "I'm washed and dressed", "teeth are brushed and face washed"),
    },
    "check_in": {
        "short": ("doing alright", "feeling okay", "okay today", "alright here"),
        "long": ("I'm feeling alright today", "doing okay, had some lunch",
                 "feeling steady this afternoon", "I'm okay, just resting"),
    },
    "appointment": {
        "short": ("on my way", "leaving now", "heading out", "got my coat"),
        "long": ("I'm getting my coat for the appointment", "heading to the clinic now",
                 "waiting for the taxi to the doctor", "I have my card for the appointment"),
    },
    "household": {
        "short": ("chores done", "bins out", "all tidied", "washing on"),
        "long": ("I watered the plants and tidied up", "the bins are out",
                 "I put the washing on", "the kitchen is tidy now"),
    },
}

# Small talk of expressive users. It deliberately shares vocabulary with the
# unrelated-topic replies used for off-topic injection.
CHATTER = (
    "lovely sunny morning here",
    "the garden looks wonderful",
    "my grandson is visiting later",
    "the birds are singing outside",
    "baking scones for tea",
    "football is on tonight",
    "had a great chat with my sister",
    "might take the dog for a walk",
)


@dataclass(frozen=True)
class Style:
    register: str  # which action phrases to use: "short" or "long"
    templates: tuple
    chatter: bool = False


STYLES = {
    "Brief, polite": Style("short", (
        "{A}, thanks.", "{A}. Thanks.", "Thanks, {a}.", "Done. Thanks.",
    )),
    "Concise, respectful": Style("short", (
        "{A}, thank you.", "{A} as scheduled. Thank you.", "Yes, {a}. Thank you kindly.",
        "Completed: {a}. Thanks.",
    )),
    "Kind, concise": Style("long", (
        "yes dear {a} thank you kindly", "{a} thank you love", "yes {a} thanks dear",
        "all good {a} thank you",
    )),
    "Hesitant, nervous": Style("long", (
        "oh um I think {a} but I'm not sure sorry", "um did I I worry I forgot but I think {a}",
        "I'm a bit confused um {a} I think is that right", "oh dear um {a} maybe sorry I'm afraid I forget",
    )),
    "Warm, responsive": Style("long", (
        "Yes! {A}, thanks so much.", "All done, {a}. Have a lovely day!", "{A}! Thank you, dear.",
        "Of course, {a}. Thanks!",
    )),
    "Calm, responsive": Style("long", (
        "yes {a} thanks have a good day", "okay {a} thank you", "{a} all good thanks",
        "yes {a} thank you kindly",
    )),
    "Friendly, positive": Style("long", (
        "Done! {A}, {c} :)", "Yes! {A} and {c}. Thanks so much!", "{A}! Also {c}, have a great day!",
        "Hello! {A}, {c}. Thank you!",
    ), chatter=True),
    "Indifferent, cold": Style("short", (
        "yeah {a}", "{a}", "mm {a}", "whatever {a}",
    )),
    "Warm, polite": Style("long", (
        "good morning {a} thank you", "{a} thanks dear", "yes {a} thank you kindly",
        "{a} thank you have a nice day",
    )),
    "Irritable, flat": Style("short", (
        "{a} stop nagging", "ugh {a}", "yes yes {a} leave it", "{a} I'm tired",
    )),
}

_GENERIC = {
    "low": Style("short", ("{A}, thanks.", "{A}.", "Yes, {a}.", "{A}, done.")),
    "moderate": Style("long", ("Yes, {a}. Thanks.", "{A}, thank you.", "Okay, {a}.", "{A}. All good.")),
    "high": Style("long", ("Done! {A}, {c}.", "Yes, {a} and {c}. Thanks!", "{A}, {c}, thank you!",
                           "Okay! {A}. Also {c}."), chatter=True),
}


def _voice(text):
    """Speech-to-text register: lowercase, no punctuation apart from apostrophes."""
    kept = "".join(ch if ch.isalnum() or ch in " '" else " " for ch in text.lower())
    return " ".join(kept.split())


@lru_cache(maxsize=None)
def response_pool(reminder_type, expressiveness, modality, tone):
    style = STYLES.get(tone) or _GENERIC[expressiveness]
    actions = ACTIONS[reminder_type]["short" if expressiveness == "low" else style.register]
    chatter = CHATTER if (style.chatter or expressiveness == "high") else ("",)
    pool = []
    for tpl in style.templates:
        for a in actions:
            for c in chatter:
                if "{c}" not in tpl and c != chatter[0]:
                    continue
                text = tpl.format(A=a[0].upper() + a[1:], a=a, c=c)
                pool.append(_voice(text) if modality == "voice" else text)
    return tuple(dict.fromkeys(pool))


# --------------------------------------------------------------------------
# generator interface

@dataclass
class GenerationRequest:
    persona: dict
    prompt_text: str
    reminder_type: str
    time_of_day: str
    few_shot_examples: list = field(default_factory=list)

    def to_json(self):
        return asdict(self)


class TextGenerator(Protocol):
    def generate(self, request: GenerationRequest, rng: np.random.Generator) -> str: ...


class GenerationError(RuntimeError):
    pass


def persona_descriptor(persona, minute_of_day):
    return {
        "id": persona.id,
        "tone": persona.tone_at(minute_of_day),
        "style": persona.style,
        "expressiveness": persona.expressiveness,
        "modality": persona.modality,
    }


class BuiltinTextGenerator:
    def generate(self, request, rng):
        d = request.persona
        pool = response_pool(request.reminder_type, d["expressiveness"], d["modality"], d["tone"])
        return pool[int(rng.integers(len(pool)))]


class HttpTextGenerator:
    """POSTs the request as JSON to ``url``; the reply must be ``{"text": ...}``."""

    def __init__(self, url, timeout=10.0):
        self.url = url
        self.timeout = timeout

    def generate(self, request, rng):
        body = json.dumps(request.to_json()).encode("utf-8")
        req = urllib.request.Request(self.url, data=body, method="POST",
                                     headers={"Content-Type": "application/json"})
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                if resp.status != 200:
                    raise GenerationError(f"HTTP {resp.status}")
                text = json.loads(resp.read().decode("utf-8"))["text"]
        except (urllib.error.URLError, OSError, ValueError, KeyError, TypeError) as exc:
            raise GenerationError(str(exc)) from exc
        if not isinstance(text, str) or not text.strip():
            raise GenerationError("empty text")
        return text


_BUILTIN = BuiltinTextGenerator()


def format_minute(minute_of_day):
    m = int(minute_of_day) % 1440
    return f"{m // 60:02d}:{m % 60:02d}"


def generate_response(persona, event, generator=None, rng=None, few_shot=(), warnings=None):
    """Reply text for an acknowledged reminder.

    Exactly one draw is taken from ``rng`` whatever the generator does, so a
    failing external service does not shift the rest of the random stream.
    """
    rng = np.random.default_rng() if rng is None else rng
    local = np.random.default_rng(int(rng.integers(2**63)))
    minute = event.t_reminder % 1440
    request = GenerationRequest(
        persona=persona_descriptor(persona, minute),
        prompt_text=event.prompt_text,
        reminder_type=event.reminder_type,
        time_of_day=format_minute(minute),
        few_shot_examples=list(few_shot),
    )
    if generator is not None and not isinstance(generator, BuiltinTextGenerator):
        try:
            return generator.generate(request, local)
        except GenerationError as exc:
            if warnings is not None:
                warnings.append(f"event {event.event_id}: text generator failed ({exc}); used builtin")
    return _BUILTIN.generate(request, local)


def is_pm(minute_of_day):
    return minute_of_day % 1440 >= PM_BOUNDARY
