from .base import DetectionResult, check_series
from .cusum import (
    THETA_GRID,
    CusumDriftDetector,
    CusumFlattenDetector,
    CusumFlattenParams,
    cusum_flatten,
    cusum_offtopic,
    grid_search_theta,
)
from .ewma import EwmaDetector, EwmaParams, ewma
from .gru import GruConfig, GruForecaster, GruModel, gru_score, gru_train
from .logreg import LogisticRegression, logreg_predict, logreg_train
from .ocsvm import OcsvmModel, OneClassSVM, ocsvm_score, ocsvm_train, rbf_kernel
from .persistence import dumps_model, loads_model

__all__ = [
    "DetectionResult", "check_series",
    "THETA_GRID", "CusumDriftDetector", "CusumFlattenDetector", "CusumFlattenParams",
    "cusum_flatten", "cusum_offtopic", "grid_search_theta",
    "EwmaDetector", "EwmaParams", "ewma",
    "GruConfig", "GruForecaster", "GruModel", "gru_score", "gru_train",
    "LogisticRegression", "logreg_predict", "logreg_train",
    "OcsvmModel", "OneClassSVM", "ocsvm_score", "ocsvm_train", "rbf_kernel",
    "dumps_model", "loads_model",
]
