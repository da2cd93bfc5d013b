from ..metrics import (
    ConfusionCounts,
    DelayResult,
    confusion,
    detection_delay,
    f1,
    f1_from_flags,
    roc_auc,
    roc_auc_pairwise,
    roc_auc_trapezoid,
)
from .benchmark import (
    BenchmarkConfig,
    CellFailure,
    CellResult,
    ConfigError,
    EvaluationReport,
    run_benchmark,
    run_classifier_benchmark,
    run_flatten_benchmark,
    run_offtopic_benchmark,
)
from .classifiers import ClassifierOutcome, generalized_eval, personalized_eval
from .pipeline import (
    FLATTEN_METHODS,
    OFFTOPIC_METHODS,
    TASKS,
    LogView,
    MethodOutcome,
    MethodTaskMismatch,
    labeled_log,
    run_flatten_method,
    run_method,
    run_offtopic_method,
)
from .report import write_report

__all__ = [
    "ConfusionCounts", "DelayResult", "confusion", "detection_delay", "f1", "f1_from_flags",
    "roc_auc", "roc_auc_pairwise", "roc_auc_trapezoid",
    "BenchmarkConfig", "CellFailure", "CellResult", "ConfigError", "EvaluationReport",
    "run_benchmark", "run_classifier_benchmark", "run_flatten_benchmark", "run_offtopic_benchmark",
    "ClassifierOutcome", "generalized_eval", "personalized_eval",
    "FLATTEN_METHODS", "OFFTOPIC_METHODS", "TASKS", "LogView", "MethodOutcome",
    "MethodTaskMismatch", "labeled_log", "run_flatten_method", "run_method", "run_offtopic_method",
    "write_report",
]
