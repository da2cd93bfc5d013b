"""Seeded simulation and detection benchmark for gradual drift in reminder-response logs."""

__version__ = "0.1.0"

from .anomaly import AnomalySpec, inject, make_spec, sample_window, severity_at  # noqa: E402
from .logfile import read_log, write_log  # noqa: E402
from .persona import Persona, builtin_personas, load_personas  # noqa: E402
from .simulator import InteractionLog, ResponseRecord, run_simulation  # noqa: E402

__all__ = [
    "__version__",
    "AnomalySpec", "inject", "make_spec", "sample_window", "severity_at",
    "read_log", "write_log",
    "Persona", "builtin_personas", "load_personas",
    "InteractionLog", "ResponseRecord", "run_simulation",
]
