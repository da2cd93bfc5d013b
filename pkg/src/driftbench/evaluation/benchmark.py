"""Multi-persona, multi-speed, multi-seed benchmark runs with per-cell failure capture."""
from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from ..anomaly import SPEEDS
from ..features import HashingEmbedder, HttpEmbedder, SemanticFeaturizer
from ..generation import HttpTextGenerator
from ..persona import builtin_personas, get_persona
from .classifiers import classifier_views, generalized_eval, personalized_eval
from .pipeline import (
    FLATTEN_METHODS,
    OFFTOPIC_METHODS,
    LogView,
    labeled_log,
    run_flatten_method,
    run_offtopic_method,
    tone_matrix,
)

CONFIG_FORMAT_VERSION = 1
CLASSIFIER = "classifier"
BENCHMARK_TASKS = ("flattened_sentiment", "off_topic", CLASSIFIER)
TABLE_SPEEDS = ("fast", "medium", "slow")
CLASSIFIER_SETTINGS = ("general", "personalized")


class ConfigError(ValueError):
    pass


def _selection(doc, key, default, allowed=None):
    value = list(doc.get(key, default))
    if not value:
        raise ConfigError(f"{key}: selection must be non-empty")
    if allowed is not None:
        bad = [v for v in value if v not in allowed]
        if bad:
            raise ConfigError(f"{key}: unknown value(s) {bad}; choose from {list(allowed)}")
    if len(set(value)) != len(value):
        raise ConfigError(f"{key}: duplicate entries")
    return value


@dataclass
class BenchmarkConfig:
    """What to run. Only fields that change results enter :meth:`config_hash`."""

    seeds: list = field(default_factory=lambda: [0])
    horizon_days: int = 60
    personas: list = field(default_factory=lambda: list(range(1, 9)))
    speeds: list = field(default_factory=lambda: list(TABLE_SPEEDS))
    tasks: list = field(default_factory=lambda: list(BENCHMARK_TASKS))
    flatten_methods: list = field(default_factory=lambda: list(FLATTEN_METHODS))
    offtopic_methods: list = field(default_factory=lambda: list(OFFTOPIC_METHODS))
    params: dict = field(default_factory=dict)
    inject: bool = True
    textgen_url: Optional[str] = None
    embed_url: Optional[str] = None
    output_dir: str = "benchmark_out"
    workers: Optional[int] = None
    timestamp: Optional[str] = None

    RUNTIME_FIELDS = ("output_dir", "workers")

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        version = doc.get("format_version", CONFIG_FORMAT_VERSION)
        if version != CONFIG_FORMAT_VERSION:
            raise ConfigError(f"unsupported config format_version {version!r}")
        known = {f for f in cls.__dataclass_fields__} | {"format_version"}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(unknown)}")
        seeds = _selection(doc, "seeds", [0])
        if not all(isinstance(s, int) and not isinstance(s, bool) and 0 <= s < 2**64 for s in seeds):
            raise ConfigError("seeds: each seed must be an integer in [0, 2^64)")
        horizon = doc.get("horizon_days", 60)
        if not isinstance(horizon, int) or horizon < 1:
            raise ConfigError("horizon_days: must be a positive integer")
        personas = _selection(doc, "personas", range(1, 9))
        known_ids = {p.id for p in builtin_personas()}
        if any(p not in known_ids for p in personas):
            raise ConfigError(f"personas: unknown persona id(s) {sorted(set(personas) - known_ids)}")
        params = doc.get("params", {})
        if not isinstance(params, dict) or not all(isinstance(v, dict) for v in params.values()):
            raise ConfigError("params: expected {task: {method: {name: value}}}")
        for task, by_method in params.items():
            if task not in ("flattened_sentiment", "off_topic"):
                raise ConfigError(f"params: unknown task {task!r}")
            allowed = FLATTEN_METHODS if task == "flattened_sentiment" else OFFTOPIC_METHODS
            for m, p in by_method.items():
                if m not in allowed or not isinstance(p, dict):
                    raise ConfigError(f"params.{task}: bad entry for method {m!r}")
        workers = doc.get("workers")
        if workers is not None and (not isinstance(workers, int) or workers < 1):
            raise ConfigError("workers: must be a positive integer")
        return cls(
            seeds=seeds,
            horizon_days=horizon,
            personas=personas,
            speeds=_selection(doc, "speeds", TABLE_SPEEDS, SPEEDS),
            tasks=_selection(doc, "tasks", BENCHMARK_TASKS, BENCHMARK_TASKS),
            flatten_methods=_selection(doc, "flatten_methods", FLATTEN_METHODS, FLATTEN_METHODS),
            offtopic_methods=_selection(doc, "offtopic_methods", OFFTOPIC_METHODS, OFFTOPIC_METHODS),
            params=params,
            inject=bool(doc.get("inject", True)),
            textgen_url=doc.get("textgen_url"),
            embed_url=doc.get("embed_url"),
            output_dir=str(doc.get("output_dir", "benchmark_out")),
            workers=workers,
            timestamp=doc.get("timestamp"),
        )

    def to_dict(self):
        d = asdict(self)
        d["format_version"] = CONFIG_FORMAT_VERSION
        return d

    def config_hash(self):
        d = {k: v for k, v in self.to_dict().items() if k not in self.RUNTIME_FIELDS}
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()

    def methods_for(self, task):
        return self.flatten_methods if task == "flattened_sentiment" else self.offtopic_methods


# --------------------------------------------------------------------------
# cells


@dataclass
class CellResult:
    """One (task, persona, speed, method, seed) outcome; ``metrics`` keyed by metric name."""

    task: str
    persona_id: int
    speed: str
    method: str
    seed: int
    metrics: dict
    records: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def cell_id(self):
        return cell_id(self.task, self.persona_id, self.speed, self.method, self.seed)


@dataclass
class CellFailure:
    task: str
    persona_id: Optional[int]
    speed: str
    method: str
    seed: int
    error: str
    message: str

    @property
    def cell_id(self):
        return cell_id(self.task, self.persona_id, self.speed, self.method, self.seed)


def cell_id(task, persona_id, speed, method, seed):
    who = "all" if persona_id is None else f"p{persona_id}"
    return f"{task}/{who}/{speed}/{method}/s{seed}"


def _providers(config):
    generator = HttpTextGenerator(config.textgen_url) if config.textgen_url else None
    embedder = HttpEmbedder(config.embed_url) if config.embed_url else HashingEmbedder()
    return generator, embedder


def _num(x):
    return None if x is None else float(x)


def _record_rows(view, outcome):
    scored = outcome.scored if outcome.scored is not None else np.ones(len(view.records), bool)
    return [{"event_id": r.event.event_id, "day": int(r.day), "label": bool(lab),
             "score": float(s), "flag": bool(f), "scored": bool(ok)}
            for r, lab, s, f, ok in zip(view.records, view.labels, outcome.scores,
                                        outcome.flags, scored)]


def _detector_unit(config, task, persona_id, speed, seed):
    """All requested methods on one simulated log; each method fails independently."""
    generator, embedder = _providers(config)
    persona = get_persona(builtin_personas(), persona_id)
    results, failures = [], []
    try:
        log = labeled_log(persona, task, speed, seed, config.horizon_days, generator,
                          inject_anomaly=config.inject)
        view = LogView.of(log)
        shared = tone_matrix(view) if task == "flattened_sentiment" else SemanticFeaturizer(log, embedder)
    except Exception as exc:  # noqa: BLE001 - reported per cell
        return [], [CellFailure(task, persona_id, speed, m, seed, type(exc).__name__, str(exc))
                    for m in config.methods_for(task)]
    spec = log.anomaly_spec
    for method in config.methods_for(task):
        params = config.params.get(task, {}).get(method, {})
        try:
            if task == "flattened_sentiment":
                o = run_flatten_method(view, method, params, tone=shared)
                metrics = {"f1": o.f1, "delay_days": _num(o.delay_days),
                           "detected": o.detected, "episodes": o.episodes}
            else:
                o = run_offtopic_method(log, view, method, params, embedder, featurizer=shared)
                metrics = {"f1": o.f1, "roc_auc": _num(o.roc_auc)}
        except Exception as exc:  # noqa: BLE001
            failures.append(CellFailure(task, persona_id, speed, method, seed,
                                        type(exc).__name__, str(exc)))
            continue
        metrics["n_records"] = len(view.records)
        metrics["n_anomalous"] = int(view.labels.sum())
        results.append(CellResult(task, persona_id, speed, method, seed, metrics,
                                  _record_rows(view, o),
                                  {"threshold": float(o.threshold),
                                   "anomaly_spec": None if spec is None else spec.to_dict()}))
    return results, failures


def _classifier_metrics(o):
    return {"f1": _num(o.f1), "roc_auc": _num(o.roc_auc), "n_train": o.n_train,
            "n_test": o.n_test, "evaluable": o.evaluable, "reason": o.reason}


def _classifier_rows(o):
    return [{"event_id": e, "label": bool(y), "probability": float(p)}
            for e, y, p in zip(o.event_ids, o.labels, o.probabilities)]


def _classifier_unit(config, speed, seed):
    """Personalized and leave-one-user-out classifiers over every selected persona."""
    generator, embedder = _providers(config)
    personas = builtin_personas()
    try:
        logs = [labeled_log(get_persona(personas, pid), "off_topic", speed, seed,
                            config.horizon_days, generator, inject_anomaly=config.inject)
                for pid in config.personas]
        views, mats = classifier_views(logs, embedder)
        general = generalized_eval(views, mats, config.personas, seed) if len(views) > 1 else None
    except Exception as exc:  # noqa: BLE001
        return [], [CellFailure(CLASSIFIER, None, speed, s, seed, type(exc).__name__, str(exc))
                    for s in CLASSIFIER_SETTINGS]
    results, failures = [], []
    for k, pid in enumerate(config.personas):
        try:
            o = personalized_eval(views[k], mats[k], pid, seed)
            results.append(CellResult(CLASSIFIER, pid, speed, "personalized", seed,
                                      _classifier_metrics(o), _classifier_rows(o)))
        except Exception as exc:  # noqa: BLE001
            failures.append(CellFailure(CLASSIFIER, pid, speed, "personalized", seed,
                                        type(exc).__name__, str(exc)))
        if general is None:
            failures.append(CellFailure(CLASSIFIER, pid, speed, "general", seed, "ValueError",
                                        "leave-one-user-out needs at least two users"))
        else:
            results.append(CellResult(CLASSIFIER, pid, speed, "general", seed,
                                      _classifier_metrics(general[k]), _classifier_rows(general[k])))
    return results, failures


def _run_unit(args):
    kind, config, key = args
    if kind == CLASSIFIER:
        return _classifier_unit(config, *key)
    return _detector_unit(config, kind, *key)


def work_units(config):
    units = []
    for task in ("flattened_sentiment", "off_topic"):
        if task in config.tasks:
            units += [(task, config, (pid, speed, seed)) for speed in config.speeds
                      for pid in config.personas for seed in config.seeds]
    if CLASSIFIER in config.tasks:
        units += [(CLASSIFIER, config, (speed, seed)) for speed in config.speeds
                  for seed in config.seeds]
    return units


def default_workers():
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def execute(config, workers=None):
    """Run every unit; results come back in unit order regardless of worker count."""
    units = work_units(config)
    workers = workers or config.workers or default_workers()
    if workers <= 1 or len(units) <= 1:
        outputs = [_run_unit(u) for u in units]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(units))) as pool:
            outputs = list(pool.map(_run_unit, units))
    results = [r for rs, _ in outputs for r in rs]
    failures = [f for _, fs in outputs for f in fs]
    return results, failures


# --------------------------------------------------------------------------
# aggregation


def _mean(values):
    vals = [v for v in values if v is not None]
    return float(np.mean(vals)) if vals else None


@dataclass
class EvaluationReport:
    """Per-seed cell results plus seed-averaged summaries keyed by (task, speed, persona, method)."""

    config: BenchmarkConfig
    results: list
    failures: list

    def summary(self):
        groups = {}
        for r in self.results:
            groups.setdefault((r.task, r.speed, r.persona_id, r.method), []).append(r)
        out = {}
        for key, rs in groups.items():
            names = [k for k in ("f1", "delay_days", "roc_auc") if k in rs[0].metrics]
            row = {k: _mean([r.metrics[k] for r in rs]) for k in names}
            row["n_seeds"] = len(rs)
            if "delay_days" in names:
                row["detected_seeds"] = sum(r.metrics["delay_days"] is not None for r in rs)
            out[key] = row
        return out

    def cell(self, task, speed, persona_id, method):
        return self.summary().get((task, speed, persona_id, method))

    @property
    def ok(self):
        return not self.failures

    def metadata(self):
        return {"seeds": list(self.config.seeds), "config_hash": self.config.config_hash(),
                "timestamp": self.config.timestamp, "n_cells": len(self.results),
                "n_failures": len(self.failures)}


def run_benchmark(config, workers=None):
    results, failures = execute(config, workers)
    return EvaluationReport(config, results, failures)


def _task_config(config, task, personas, speeds, methods, seeds):
    d = config.to_dict() if config is not None else BenchmarkConfig().to_dict()
    d.update(tasks=[task])
    if personas is not None:
        d["personas"] = [p.id if hasattr(p, "id") else int(p) for p in personas]
    if speeds is not None:
        d["speeds"] = list(speeds)
    if seeds is not None:
        d["seeds"] = list(seeds)
    if methods is not None:
        d["flatten_methods" if task == "flattened_sentiment" else "offtopic_methods"] = list(methods)
    return BenchmarkConfig.from_dict(d)


def run_flatten_benchmark(personas=None, speeds=None, methods=None, seeds=None, config=None,
                          workers=None):
    """Flattened-sentiment cells: F1 and detection delay per persona, speed, method."""
    return run_benchmark(_task_config(config, "flattened_sentiment", personas, speeds, methods, seeds),
                         workers)


def run_offtopic_benchmark(personas=None, speeds=None, methods=None, seeds=None, config=None,
                           workers=None):
    """Off-topic cells: F1 and ROC AUC per persona, speed, method."""
    return run_benchmark(_task_config(config, "off_topic", personas, speeds, methods, seeds), workers)


def run_classifier_benchmark(personas=None, speeds=None, seeds=None, config=None, workers=None):
    """Personalized vs generalized logistic classifiers on off-topic logs."""
    return run_benchmark(_task_config(config, CLASSIFIER, personas, speeds, None, seeds), workers)
