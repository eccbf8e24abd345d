"""Multi-label few-shot classification over label-combination prototypes."""

from .core import (
    Episode,
    LabelSet,
    LabelVocabulary,
    QueryItem,
    SupportItem,
    validate_episode,
)
from .engine import (
    Extent,
    LCClassSet,
    OriginalClassifier,
    Prediction,
    PrototypeIndex,
    UniquePrototype,
    build_prototype_index,
    build_prototypes_original,
    classify,
    classify_original,
    cosine_distance,
    enumerate_lc_classes,
    extent_of,
)

__version__ = "0.1.0"

__all__ = [
    "Episode",
    "Extent",
    "LCClassSet",
    "LabelSet",
    "LabelVocabulary",
    "OriginalClassifier",
    "Prediction",
    "PrototypeIndex",
    "QueryItem",
    "SupportItem",
    "UniquePrototype",
    "build_prototype_index",
    "build_prototypes_original",
    "classify",
    "classify_original",
    "cosine_distance",
    "enumerate_lc_classes",
    "extent_of",
    "validate_episode",
]
