from .baseline import BaselineScaler, BaselineStats, composite_tone_index, z_normalize
from .embedding import (
    DEFAULT_DIM,
    EmbeddingError,
    HashingEmbedder,
    HttpEmbedder,
    cosine_distance,
    cosine_similarity,
    embed,
)
from .semantic import (
    SemanticFeaturizer,
    SemanticFeatures,
    expected_response_embedding,
    keyword_overlap,
    semantic_features,
)
from .tone import ToneFeatureExtractor, ToneFeatures, tone_features

__all__ = [
    "BaselineScaler", "BaselineStats", "composite_tone_index", "z_normalize",
    "DEFAULT_DIM", "EmbeddingError", "HashingEmbedder", "HttpEmbedder",
    "cosine_distance", "cosine_similarity", "embed",
    "SemanticFeaturizer", "SemanticFeatures", "expected_response_embedding",
    "keyword_overlap", "semantic_features",
    "ToneFeatureExtractor", "ToneFeatures", "tone_features",
]
