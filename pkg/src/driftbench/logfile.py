"""JSON Lines serialization of interaction logs.

Line 1 is a header object; every further line is one response record.
"""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .anomaly import AnomalyLabel, AnomalySpec
from .simulator import InteractionLog, ReminderEvent, ResponseRecord

FORMAT_VERSION = 1


class LogFormatError(ValueError):
    pass


def _event_dict(e):
    return {"event_id": e.event_id, "day": e.day, "t_reminder": e.t_reminder,
            "reminder_type": e.reminder_type, "location": e.location,
            "prompt_text": e.prompt_text, "source": e.source}


def record_to_dict(r):
    return {
        "event": _event_dict(r.event),
        "acknowledged": r.acknowledged,
        "t_ack": r.t_ack,
        "response_text": r.response_text,
        "modality": r.modality,
        "anomaly_label": None if r.anomaly_label is None else r.anomaly_label.to_dict(),
    }


def header_dict(log):
    header = {"persona_id": log.persona_id, "seed": log.seed, "horizon_days": log.horizon_days,
              "format_version": FORMAT_VERSION}
    if log.anomaly_spec is not None:
        header["anomaly_spec"] = log.anomaly_spec.to_dict()
    if log.warnings:
        header["warnings"] = list(log.warnings)
    return header


def dumps_log(log):
    lines = [json.dumps(header_dict(log), ensure_ascii=False)]
    lines += [json.dumps(record_to_dict(r), ensure_ascii=False) for r in log.records]
    return "\n".join(lines) + "\n"


def loads_log(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise LogFormatError("empty log file")
    try:
        header = json.loads(lines[0])
        if header.get("format_version") != FORMAT_VERSION:
            raise LogFormatError(f"unsupported format_version {header.get('format_version')!r}")
        records = []
        for ln in lines[1:]:
            d = json.loads(ln)
            label = d.get("anomaly_label")
            records.append(ResponseRecord(
                event=ReminderEvent(**d["event"]),
                acknowledged=bool(d["acknowledged"]),
                t_ack=d["t_ack"],
                response_text=d["response_text"],
                modality=d["modality"],
                anomaly_label=None if label is None else AnomalyLabel.from_dict(label),
            ))
        spec = header.get("anomaly_spec")
        return InteractionLog(
            persona_id=header["persona_id"], seed=header["seed"],
            horizon_days=header["horizon_days"], records=records,
            anomaly_spec=None if spec is None else AnomalySpec.from_dict(spec),
            warnings=header.get("warnings", ()),
        )
    except LogFormatError:
        raise
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise LogFormatError(f"malformed log: {exc}") from exc


def atomic_write_text(path, text):
    """Write via a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_log(log, path):
    atomic_write_text(path, dumps_log(log))


def read_log(path):
    return loads_log(Path(path).read_text(encoding="utf-8"))
