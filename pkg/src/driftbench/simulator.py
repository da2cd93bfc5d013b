"""Longitudinal reminder/response simulation.

Day 0 is a Monday; the clock counts integer minutes from the start of day 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .generation import generate_response
from .persona import REMINDER_TYPES, WEEKDAYS, ack_probability, sample_delay
from .prompts import PROMPT_VARIANTS

DEFAULT_HORIZON = 60
MAX_RANDOM_PER_DAY = 3
RANDOM_WINDOW = (8 * 60, 20 * 60)
FEW_SHOT = 3


@dataclass(frozen=True)
class ReminderEvent:
    event_id: str
    day: int
    t_reminder: int
    reminder_type: str
    location: str
    prompt_text: str
    source: str

    def __post_init__(self):
        if self.t_reminder // 1440 != self.day:
            raise ValueError(f"{self.event_id}: t_reminder {self.t_reminder} not on day {self.day}")
        if self.source not in ("routine", "random"):
            raise ValueError(f"unknown source {self.source!r}")


@dataclass(frozen=True)
class ResponseRecord:
    event: ReminderEvent
    acknowledged: bool
    t_ack: Optional[float]
    response_text: Optional[str]
    modality: str
    anomaly_label: Optional[object] = None

    def __post_init__(self):
        present = (self.t_ack is not None, self.response_text is not None)
        if present != (self.acknowledged, self.acknowledged):
            raise ValueError(f"{self.event.event_id}: acknowledged must match t_ack/response_text")
        if self.acknowledged and self.t_ack < self.event.t_reminder:
            raise ValueError(f"{self.event.event_id}: t_ack precedes the reminder")

    @property
    def day(self):
        return self.event.day


@dataclass(frozen=True)
class InteractionLog:
    persona_id: int
    seed: int
    horizon_days: int
    records: tuple
    anomaly_spec: Optional[object] = None
    warnings: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        object.__setattr__(self, "warnings", tuple(self.warnings))
        times = [r.event.t_reminder for r in self.records]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("records must be strictly ordered by t_reminder")

    @property
    def acknowledged(self):
        return [r for r in self.records if r.acknowledged]

    def with_records(self, records, **changes):
        return replace(self, records=tuple(records), **changes)


def persona_rng(seed, persona_id, *stream):
    """Independent stream for one persona; insensitive to the order runs are made in."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), int(persona_id),
                                                         *map(int, stream)]))


def weekday(day):
    return WEEKDAYS[day % 7]


def build_schedule(persona, horizon_days=DEFAULT_HORIZON):
    if horizon_days < 1:
        raise ValueError("horizon_days must be >= 1")
    events = []
    for day in range(horizon_days):
        wd = weekday(day)
        for idx, entry in enumerate(persona.schedule):
            if wd not in entry.days_of_week:
                continue
            variants = PROMPT_VARIANTS[entry.reminder_type]
            events.append(ReminderEvent(
                event_id=f"p{persona.id}-d{day:03d}-r{idx}",
                day=day,
                t_reminder=day * 1440 + entry.time_of_day,
                reminder_type=entry.reminder_type,
                location=entry.location,
                prompt_text=variants[(day + idx) % len(variants)],
                source="routine",
            ))
    return events


def truncated_poisson_mean(rate, cap=MAX_RANDOM_PER_DAY):
    """Mean of min(Poisson(rate), cap)."""
    pmf = [math.exp(-rate) * rate**k / math.factorial(k) for k in range(cap)]
    return sum(k * p for k, p in enumerate(pmf)) + cap * (1.0 - sum(pmf))


def inject_random_events(persona, horizon_days, rng):
    """Unscheduled reminders: per day min(Poisson(rate), 3) events with weighted types."""
    types = list(REMINDER_TYPES)
    w = np.array([persona.event_type_weights.get(t, 0.0) for t in types], dtype=float)
    probs = w / w.sum()
    events = []
    for day in range(horizon_days):
        count = min(int(rng.poisson(persona.event_rate_per_day)), MAX_RANDOM_PER_DAY)
        for j in range(count):
            rtype = types[int(rng.choice(len(types), p=probs))]
            minute = int(rng.integers(RANDOM_WINDOW[0], RANDOM_WINDOW[1] + 1))
            variants = PROMPT_VARIANTS[rtype]
            events.append(ReminderEvent(
                event_id=f"p{persona.id}-d{day:03d}-x{j}",
                day=day,
                t_reminder=day * 1440 + minute,
                reminder_type=rtype,
                location="away" if rtype == "appointment" else "home",
                prompt_text=variants[int(rng.integers(len(variants)))],
                source="random",
            ))
    return events


def simulate_acknowledgment(event, persona, rng):
    """Ack time in minutes, or ``None`` for a missed reminder."""
    delay = sample_delay(persona.delay_model, rng)
    if delay > persona.ack_window_minutes:
        return None
    if rng.random() >= ack_probability(persona, event.location):
        return None
    return event.t_reminder + delay


def _merge(routine, extra):
    """Time-ordered union; a random event colliding with an occupied minute moves later."""
    taken = {e.t_reminder for e in routine}
    merged = list(routine)
    for e in sorted(extra, key=lambda e: (e.t_reminder, e.event_id)):
        t = e.t_reminder
        while t in taken:
            t += 1
        taken.add(t)
        merged.append(replace(e, t_reminder=t, day=t // 1440))
    return sorted(merged, key=lambda e: e.t_reminder)


def run_simulation(persona, horizon_days=DEFAULT_HORIZON, seed=0, generator=None):
    rng = persona_rng(seed, persona.id)
    events = _merge(build_schedule(persona, horizon_days),
                    inject_random_events(persona, horizon_days, rng))
    records, history, warnings = [], [], []
    for event in events:
        t_ack = simulate_acknowledgment(event, persona, rng)
        text = None
        if t_ack is not None:
            text = generate_response(persona, event, generator, rng,
                                     few_shot=history[-FEW_SHOT:], warnings=warnings)
            history.append(text)
            t_ack = round(t_ack, 3)
        records.append(ResponseRecord(event, t_ack is not None, t_ack, text, persona.modality))
    return InteractionLog(persona.id, int(seed), horizon_days, records, warnings=warnings)
