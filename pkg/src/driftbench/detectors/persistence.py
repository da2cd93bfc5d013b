"""Versioned JSON save/load for fitted detectors."""
from __future__ import annotations

import json

import numpy as np

from .cusum import CusumDriftDetector, CusumFlattenDetector
from .ewma import EwmaDetector
from .gru import GruForecaster
from .logreg import LogisticRegression
from .ocsvm import OneClassSVM

MODEL_FORMAT_VERSION = 1
REGISTRY = {cls.__name__: cls for cls in (CusumFlattenDetector, CusumDriftDetector, EwmaDetector,
                                          OneClassSVM, GruForecaster, LogisticRegression)}


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def model_to_dict(estimator):
    name = type(estimator).__name__
    if name not in REGISTRY:
        raise TypeError(f"cannot serialize {name}")
    return {"format_version": MODEL_FORMAT_VERSION, "model": name,
            "params": _jsonable(estimator.get_params()), "state": _jsonable(estimator._state())}


def model_from_dict(doc):
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format_version {doc.get('format_version')!r}")
    cls = REGISTRY[doc["model"]]
    est = cls(**doc["params"])
    if hasattr(est, "_load_state"):
        est._load_state(doc["state"])
    else:
        for k, v in doc["state"].items():
            setattr(est, k, v)
    return est


def dumps_model(estimator):
    return json.dumps(model_to_dict(estimator), sort_keys=True)


def loads_model(text):
    return model_from_dict(json.loads(text))
