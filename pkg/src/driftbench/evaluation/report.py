"""Render an :class:`EvaluationReport` as CSV tables, a Markdown document and a JSON audit bundle."""
from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import asdict

from .. import __version__
from ..logfile import atomic_write_text
from .benchmark import CLASSIFIER, CLASSIFIER_SETTINGS

REPORT_FORMAT_VERSION = 1
TASK_TITLES = {
    "flattened_sentiment": "flattened sentiment detection",
    "off_topic": "off-topic detection",
    CLASSIFIER: "personalized vs. general off-topic detection",
}
METHOD_LABELS = {"cusum": "CUSUM", "ewma": "EWMA", "ocsvm": "SVM", "gru": "GRU",
                 "general": "General", "personalized": "Personalized"}


def _columns(task):
    return ("f1", "delay_days") if task == "flattened_sentiment" else ("f1", "roc_auc")


def _methods(report, task):
    if task == CLASSIFIER:
        return list(CLASSIFIER_SETTINGS)
    return list(report.config.methods_for(task))


def table_rows(report, task, speed):
    """``[persona, m1_metric1, m1_metric2, ...]`` rows for one task and speed."""
    summary = report.summary()
    cols = _columns(task)
    rows = []
    for pid in report.config.personas:
        row = [pid]
        for m in _methods(report, task):
            cell = summary.get((task, speed, pid, m), {})
            row += [cell.get(c) for c in cols]
        rows.append(row)
    return rows


def table_header(report, task):
    return ["persona"] + [f"{m}_{c}" for m in _methods(report, task) for c in _columns(task)]


def _fmt(x, digits):
    return "" if x is None else f"{x:.{digits}f}"


def table_csv(report, task, speed):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table_header(report, task))
    for row in table_rows(report, task, speed):
        w.writerow([row[0]] + [_fmt(v, 6) for v in row[1:]])
    return buf.getvalue()


def table_name(task, speed):
    prefix = {"flattened_sentiment": "flatten", "off_topic": "offtopic", CLASSIFIER: "classifier"}
    return f"{prefix[task]}_{speed}"


def _tables(report):
    return [(task, speed) for task in ("flattened_sentiment", "off_topic", CLASSIFIER)
            if task in report.config.tasks for speed in report.config.speeds]


def markdown(report):
    meta = report.metadata()
    lines = ["# Drift detection benchmark", "",
             f"Seeds: {', '.join(map(str, meta['seeds']))}. "
             f"Config hash: `{meta['config_hash'][:16]}`. "
             "Values are means over seeds; delays average only detected runs.", ""]
    metric_names = {"f1": "F1", "delay_days": "Delay (days)", "roc_auc": "ROC AUC"}
    for task, speed in _tables(report):
        methods = _methods(report, task)
        cols = _columns(task)
        lines += [f"## Results of {speed} {TASK_TITLES[task]}", ""]
        lines.append("| Persona | " + " | ".join(
            f"{METHOD_LABELS[m]} {metric_names[c]}" for m in methods for c in cols) + " |")
        lines.append("|---" * (1 + len(methods) * len(cols)) + "|")
        for row in table_rows(report, task, speed):
            cells = [_fmt(v, 3) if v is not None else "n/a" for v in row[1:]]
            lines.append(f"| {row[0]} | " + " | ".join(cells) + " |")
        lines.append("")
    if report.failures:
        lines += ["## Failed cells", ""]
        lines += [f"- `{f.cell_id}`: {f.error}: {f.message}" for f in report.failures]
        lines.append("")
    return "\n".join(lines)


def bundle(report):
    summary = [{"task": t, "speed": s, "persona_id": p, "method": m, **row}
               for (t, s, p, m), row in report.summary().items()]
    return {
        "format_version": REPORT_FORMAT_VERSION,
        "generator": f"driftbench {__version__}",
        "metadata": report.metadata(),
        "config": {k: v for k, v in report.config.to_dict().items()
                   if k not in report.config.RUNTIME_FIELDS},
        "summary": summary,
        "cells": [{"cell_id": r.cell_id, **asdict(r)} for r in report.results],
        "failures": [{"cell_id": f.cell_id, **asdict(f)} for f in report.failures],
    }


def write_report(report, out_dir):
    """Write every table CSV, ``report.md`` and ``report.json``; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for task, speed in _tables(report):
        path = os.path.join(out_dir, f"{table_name(task, speed)}.csv")
        atomic_write_text(path, table_csv(report, task, speed))
        paths.append(path)
    md = os.path.join(out_dir, "report.md")
    atomic_write_text(md, markdown(report))
    js = os.path.join(out_dir, "report.json")
    atomic_write_text(js, json.dumps(bundle(report), sort_keys=True, indent=1) + "\n")
    return paths + [md, js]
