"""Persona profiles, response-delay models and the eight built-in personas."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Optional, Union

import numpy as np

REMINDER_TYPES = ("medication", "hygiene", "check_in", "appointment", "household")
WEEKDAYS = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")
EXPRESSIVENESS = ("low", "moderate", "high")
MODALITIES = ("typed", "voice")

#: Minutes-in-day at which the afternoon tone takes over.
PM_BOUNDARY = 12 * 60
DEFAULT_LIKELIHOOD = 0.85
_MAX_RESAMPLES = 8


class PersonaValidationError(ValueError):
    """A persona document violates the schema; names the persona and field."""

    def __init__(self, persona_id, field_name, message):
        self.persona_id = persona_id
        self.field = field_name
        super().__init__(f"persona {persona_id}: field '{field_name}': {message}")


@dataclass(frozen=True)
class NormalDelay:
    mu_minutes: float
    sigma_minutes: float

    def __post_init__(self):
        if not self.sigma_minutes > 0:
            raise ValueError("sigma_minutes must be > 0")


@dataclass(frozen=True)
class TriangularDelay:
    a_minutes: float
    b_minutes: float
    c_minutes: float

    def __post_init__(self):
        if not self.a_minutes <= self.c_minutes <= self.b_minutes:
            raise ValueError("triangular delay needs a <= c <= b")

    @property
    def mean(self):
        return (self.a_minutes + self.b_minutes + self.c_minutes) / 3.0


DelayModel = Union[NormalDelay, TriangularDelay]


@dataclass(frozen=True)
class ScheduleEntry:
    reminder_type: str
    time_of_day: int
    days_of_week: tuple
    location: str = "home"

    def __post_init__(self):
        if self.reminder_type not in REMINDER_TYPES:
            raise ValueError(f"unknown reminder_type {self.reminder_type!r}")
        if not 0 <= self.time_of_day < 1440:
            raise ValueError("time_of_day must be in [0, 1440)")
        if not self.days_of_week:
            raise ValueError("days_of_week must be non-empty")
        unknown = set(self.days_of_week) - set(WEEKDAYS)
        if unknown:
            raise ValueError(f"unknown weekday(s) {sorted(unknown)}")
        object.__setattr__(self, "days_of_week", tuple(self.days_of_week))


@dataclass(frozen=True)
class Persona:
    id: int
    tone_am: str
    tone_pm: str
    style: str
    expressiveness: str
    modality: str
    schedule: tuple
    delay_model: DelayModel
    ack_window_minutes: int = 120
    response_likelihood: Mapping[str, float] = field(default_factory=dict)
    event_rate_per_day: float = 0.5
    event_type_weights: Mapping[str, float] = field(default_factory=dict)
    default_response_likelihood: float = DEFAULT_LIKELIHOOD

    def __post_init__(self):
        object.__setattr__(self, "schedule", tuple(self.schedule))
        object.__setattr__(self, "response_likelihood",
                           MappingProxyType(dict(self.response_likelihood)))
        weights = dict(self.event_type_weights) or {t: 1.0 for t in REMINDER_TYPES}
        object.__setattr__(self, "event_type_weights", MappingProxyType(weights))
        _validate(self)

    def tone_at(self, minute_of_day):
        return self.tone_am if minute_of_day % 1440 < PM_BOUNDARY else self.tone_pm

    @property
    def time_varying(self):
        return self.tone_am != self.tone_pm

    def describe(self):
        if self.time_varying:
            return f"AM: {self.tone_am} PM: {self.tone_pm}"
        return self.tone_am


def _validate(p):
    pid = p.id

    def fail(name, msg):
        raise PersonaValidationError(pid, name, msg)

    if not isinstance(pid, int) or isinstance(pid, bool) or pid < 1:
        fail("id", "must be a positive integer")
    for name in ("tone_am", "tone_pm", "style"):
        if not isinstance(getattr(p, name), str) or not getattr(p, name):
            fail(name, "must be a non-empty string")
    if p.expressiveness not in EXPRESSIVENESS:
        fail("expressiveness", f"must be one of {EXPRESSIVENESS}")
    if p.modality not in MODALITIES:
        fail("modality", f"must be one of {MODALITIES}")
    if not isinstance(p.delay_model, (NormalDelay, TriangularDelay)):
        fail("delay_model", "must be a normal or triangular delay model")
    if not isinstance(p.ack_window_minutes, int) or p.ack_window_minutes <= 0:
        fail("ack_window_minutes", "must be a positive integer")
    for loc, prob in p.response_likelihood.items():
        if not _is_prob(prob):
            fail("response_likelihood", f"probability for {loc!r} must lie in [0, 1], got {prob}")
    if not _is_prob(p.default_response_likelihood):
        fail("default_response_likelihood", "must lie in [0, 1]")
    if not (_is_real(p.event_rate_per_day) and p.event_rate_per_day >= 0):
        fail("event_rate_per_day", "must be a real >= 0")
    for rtype, w in p.event_type_weights.items():
        if rtype not in REMINDER_TYPES:
            fail("event_type_weights", f"unknown reminder type {rtype!r}")
        if not (_is_real(w) and w >= 0):
            fail("event_type_weights", f"weight for {rtype!r} must be >= 0")
    if sum(p.event_type_weights.values()) <= 0:
        fail("event_type_weights", "at least one weight must be positive")
    for entry in p.schedule:
        if not isinstance(entry, ScheduleEntry):
            fail("schedule", "entries must be ScheduleEntry values")


def _is_real(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _is_prob(x):
    return _is_real(x) and 0.0 <= x <= 1.0


def sample_delay(model, rng):
    """Draw one acknowledgment delay in minutes.

    Normal draws are kept non-negative by resampling a bounded number of
    times and clamping at zero afterwards.
    """
    if isinstance(model, TriangularDelay):
        a, b, c = model.a_minutes, model.b_minutes, model.c_minutes
        if a == b:
            return float(a)
        return float(rng.triangular(a, c, b))
    for _ in range(_MAX_RESAMPLES):
        x = rng.normal(model.mu_minutes, model.sigma_minutes)
        if x >= 0:
            return float(x)
    return 0.0


def ack_probability(persona, location):
    return float(persona.response_likelihood.get(location, persona.default_response_likelihood))


# --------------------------------------------------------------------------
# built-in roster

PERSONA_TRAITS = {
    1: dict(tone_am="Brief, polite", tone_pm="Brief, polite", style="Short, neutral",
            expressiveness="low", modality="typed"),
    2: dict(tone_am="Concise, respectful", tone_pm="Concise, respectful",
            style="Short, routine-compliant", expressiveness="low", modality="typed"),
    3: dict(tone_am="Kind, concise", tone_pm="Hesitant, nervous",
            style="AM: Short PM: Wordier responses", expressiveness="moderate", modality="voice"),
    4: dict(tone_am="Warm, responsive", tone_pm="Warm, responsive", style="Short, affirmative",
            expressiveness="moderate", modality="typed"),
    5: dict(tone_am="Calm, responsive", tone_pm="Calm, responsive", style="Short, friendly",
            expressiveness="moderate", modality="voice"),
    6: dict(tone_am="Friendly, positive", tone_pm="Friendly, positive", style="Casual",
            expressiveness="high", modality="typed"),
    7: dict(tone_am="Indifferent, cold", tone_pm="Indifferent, cold", style="Short",
            expressiveness="low", modality="voice"),
    8: dict(tone_am="Warm, polite", tone_pm="Irritable, flat", style="Short and simple",
            expressiveness="moderate", modality="voice"),
}

_DAILY = WEEKDAYS
# per-persona minute offsets keep the routines distinct without changing their shape
_ROUTINE_SHIFT = {1: 0, 2: -30, 3: 15, 4: 30, 5: -15, 6: 45, 7: 60, 8: -45}


def _builtin_schedule(pid):
    s = _ROUTINE_SHIFT[pid]
    return (
        ScheduleEntry("hygiene", 8 * 60 + s, _DAILY, "home"),
        ScheduleEntry("medication", 9 * 60 + s, _DAILY, "home"),
        ScheduleEntry("household", 11 * 60 + s, ("Mon", "Wed", "Fri"), "home"),
        ScheduleEntry("check_in", 14 * 60 + s, _DAILY, "home"),
        ScheduleEntry("appointment", 15 * 60 + 30 + s, ("Thu",), "away"),
        ScheduleEntry("medication", 20 * 60 + s, _DAILY, "home"),
    )


def builtin_personas():
    personas = []
    for pid, traits in PERSONA_TRAITS.items():
        if traits["modality"] == "typed":
            delay = NormalDelay(8.0, 3.0)
        else:
            delay = TriangularDelay(1.0, 20.0, 5.0)
        personas.append(Persona(
            id=pid,
            schedule=_builtin_schedule(pid),
            delay_model=delay,
            ack_window_minutes=120,
            response_likelihood={"home": 0.85, "away": 0.6},
            event_rate_per_day=0.5,
            event_type_weights={t: 1.0 for t in REMINDER_TYPES},
            **traits,
        ))
    return personas


# --------------------------------------------------------------------------
# JSON config surface

_FIELDS = ("id", "tone_am", "tone_pm", "style", "expressiveness", "modality", "schedule",
           "delay_model", "ack_window_minutes", "response_likelihood", "event_rate_per_day",
           "event_type_weights", "default_response_likelihood")
_REQUIRED = ("id", "tone_am", "style", "expressiveness", "modality", "delay_model")
_ENTRY_FIELDS = ("reminder_type", "time_of_day", "days_of_week", "location")


def persona_to_dict(p):
    if isinstance(p.delay_model, NormalDelay):
        delay = {"kind": "normal", "mu_minutes": p.delay_model.mu_minutes,
                 "sigma_minutes": p.delay_model.sigma_minutes}
    else:
        delay = {"kind": "triangular", "a_minutes": p.delay_model.a_minutes,
                 "b_minutes": p.delay_model.b_minutes, "c_minutes": p.delay_model.c_minutes}
    return {
        "id": p.id,
        "tone_am": p.tone_am,
        "tone_pm": p.tone_pm,
        "style": p.style,
        "expressiveness": p.expressiveness,
        "modality": p.modality,
        "schedule": [{"reminder_type": e.reminder_type, "time_of_day": e.time_of_day,
                      "days_of_week": list(e.days_of_week), "location": e.location}
                     for e in p.schedule],
        "delay_model": delay,
        "ack_window_minutes": p.ack_window_minutes,
        "response_likelihood": dict(p.response_likelihood),
        "event_rate_per_day": p.event_rate_per_day,
        "event_type_weights": dict(p.event_type_weights),
        "default_response_likelihood": p.default_response_likelihood,
    }


def dump_personas(personas):
    return json.dumps([persona_to_dict(p) for p in personas], indent=2)


def persona_from_dict(obj):
    if not isinstance(obj, dict):
        raise PersonaValidationError("?", "<root>", "persona entry must be an object")
    pid = obj.get("id", "?")
    unknown = sorted(set(obj) - set(_FIELDS))
    if unknown:
        raise PersonaValidationError(pid, unknown[0], "unknown field")
    for name in _REQUIRED:
        if name not in obj:
            raise PersonaValidationError(pid, name, "missing required field")
    kwargs = dict(obj)
    kwargs.setdefault("tone_pm", obj["tone_am"])
    try:
        kwargs["delay_model"] = _delay_from_dict(obj["delay_model"])
    except (TypeError, ValueError, KeyError) as exc:
        raise PersonaValidationError(pid, "delay_model", str(exc)) from None
    try:
        kwargs["schedule"] = tuple(_entry_from_dict(e) for e in obj.get("schedule", []))
    except (TypeError, ValueError, KeyError) as exc:
        raise PersonaValidationError(pid, "schedule", str(exc)) from None
    for name in ("response_likelihood", "event_type_weights"):
        if name in kwargs and not isinstance(kwargs[name], dict):
            raise PersonaValidationError(pid, name, "must be an object")
    return Persona(**kwargs)


def _delay_from_dict(d):
    if not isinstance(d, dict):
        raise TypeError("delay_model must be an object")
    kind = d.get("kind")
    if kind == "normal":
        extra = set(d) - {"kind", "mu_minutes", "sigma_minutes"}
        if extra:
            raise ValueError(f"unknown field(s) {sorted(extra)}")
        return NormalDelay(float(d["mu_minutes"]), float(d["sigma_minutes"]))
    if kind == "triangular":
        extra = set(d) - {"kind", "a_minutes", "b_minutes", "c_minutes"}
        if extra:
            raise ValueError(f"unknown field(s) {sorted(extra)}")
        return TriangularDelay(float(d["a_minutes"]), float(d["b_minutes"]), float(d["c_minutes"]))
    raise ValueError(f"kind must be 'normal' or 'triangular', got {kind!r}")


def _entry_from_dict(e):
    if not isinstance(e, dict):
        raise TypeError("schedule entries must be objects")
    extra = set(e) - set(_ENTRY_FIELDS)
    if extra:
        raise ValueError(f"unknown field(s) {sorted(extra)}")
    return ScheduleEntry(e["reminder_type"], int(e["time_of_day"]), tuple(e["days_of_week"]),
                         e.get("location", "home"))


def load_personas(config_document: Optional[str] = None):
    """Parse a JSON persona array; with no document return the built-in roster."""
    if config_document is None:
        return builtin_personas()
    try:
        data = json.loads(config_document)
    except json.JSONDecodeError as exc:
        raise PersonaValidationError("?", "<document>", f"invalid JSON: {exc}") from None
    if not isinstance(data, list):
        raise PersonaValidationError("?", "<root>", "top level must be an array")
    personas = [persona_from_dict(obj) for obj in data]
    seen = set()
    for p in personas:
        if p.id in seen:
            raise PersonaValidationError(p.id, "id", "duplicate persona id")
        seen.add(p.id)
    return personas


def get_persona(personas, pid):
    for p in personas:
        if p.id == pid:
            return p
    raise KeyError(pid)
