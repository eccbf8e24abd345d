"""Core domain types: vocabularies, label sets, items, and episodes.

All types are immutable after construction and safe to share between
threads. Label sets are bitmasks over dense integer ids (id = position in
the vocabulary), because subset tests and power-set enumeration dominate
the engine's hot path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

# Hard ceiling on vocabulary size; wide margin over real tag sets while
# keeping masks cheap.
MAX_VOCAB_LABELS = 1024


@dataclass(frozen=True)
class LabelVocabulary:
    """Ordered list of unique label names; a label's id is its position."""

    names: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not names:
            raise ValueError("vocabulary must contain at least one label")
        if len(names) > MAX_VOCAB_LABELS:
            raise ValueError(
                f"vocabulary has {len(names)} labels, exceeding the "
                f"{MAX_VOCAB_LABELS}-label capacity"
            )
        if any(not isinstance(n, str) or not n for n in names):
            raise ValueError("label names must be non-empty strings")
        index = {name: i for i, name in enumerate(names)}
        if len(index) != len(names):
            raise ValueError("label names must be unique")
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def id_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"label {name!r} not in vocabulary") from None

    def name_of(self, label_id: int) -> str:
        if not 0 <= label_id < len(self.names):
            raise IndexError(f"label id {label_id} out of range")
        return self.names[label_id]


@dataclass(frozen=True)
class LabelSet:
    """A set of label ids stored as a bitmask.

    Equality, hashing, and iteration order depend only on the members,
    never on insertion order. Iteration yields ids ascending.
    """

    mask: int = 0

    def __post_init__(self):
        if not isinstance(self.mask, int) or self.mask < 0:
            raise ValueError("mask must be a non-negative integer")
        if self.mask.bit_length() > MAX_VOCAB_LABELS:
            raise ValueError(
                f"label id {self.mask.bit_length() - 1} exceeds the "
                f"{MAX_VOCAB_LABELS}-label capacity"
            )

    @classmethod
    def from_ids(cls, ids: Iterable[int]) -> "LabelSet":
        mask = 0
        for i in ids:
            if not isinstance(i, int) or i < 0:
                raise ValueError(f"label id must be a non-negative integer, got {i!r}")
            mask |= 1 << i
        return cls(mask)

    def ids(self) -> tuple[int, ...]:
        return tuple(self)

    def __iter__(self) -> Iterator[int]:
        mask = self.mask
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    def __contains__(self, label_id: object) -> bool:
        if not isinstance(label_id, int) or label_id < 0:
            return False
        return bool(self.mask >> label_id & 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        return self.mask != 0

    def issubset(self, other: "LabelSet") -> bool:
        return self.mask & ~other.mask == 0

    def __le__(self, other: "LabelSet") -> bool:
        return self.issubset(other)

    def __or__(self, other: "LabelSet") -> "LabelSet":
        return LabelSet(self.mask | other.mask)

    def __and__(self, other: "LabelSet") -> "LabelSet":
        return LabelSet(self.mask & other.mask)

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        """Canonical ordering key: cardinality, then the ascending id tuple."""
        return (len(self), self.ids())

    def __repr__(self) -> str:
        return f"LabelSet({{{', '.join(map(str, self))}}})"


def as_embedding(values, dtype=np.float32) -> np.ndarray:
    """Coerce to an immutable 1-D vector of the given float dtype.

    Rejects empty and non-finite input; the returned array is marked
    read-only.
    """
    arr = np.asarray(values, dtype=dtype)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("embedding must be a non-empty 1-D vector")
    if not np.isfinite(arr).all():
        raise ValueError("embedding contains non-finite values")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SupportItem:
    """A labeled example: precomputed embedding plus a non-empty label set."""

    id: str
    embedding: np.ndarray
    labels: LabelSet

    def __post_init__(self):
        object.__setattr__(self, "embedding", as_embedding(self.embedding))
        if not self.labels:
            raise ValueError(f"support item {self.id!r} must carry at least one label")


@dataclass(frozen=True, eq=False)
class QueryItem:
    """An item to classify; carries ground truth only when evaluating."""

    id: str
    embedding: np.ndarray
    truth: Optional[LabelSet] = None

    def __post_init__(self):
        object.__setattr__(self, "embedding", as_embedding(self.embedding))


@dataclass(frozen=True, eq=False)
class Episode:
    """One few-shot evaluation unit: support set, query set, and N/K config."""

    vocabulary: LabelVocabulary
    support: tuple[SupportItem, ...]
    queries: tuple[QueryItem, ...]
    n_way: int
    k_shot: int

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(self.support))
        object.__setattr__(self, "queries", tuple(self.queries))

    @property
    def dim(self) -> int:
        if self.support:
            return self.support[0].embedding.size
        if self.queries:
            return self.queries[0].embedding.size
        return 0


def validate_episode(episode: Episode) -> list[str]:
    """Check every Episode invariant, returning one message per violation.

    Violations are data, not failures: this never raises, even on
    adversarial input. An empty list means the episode is valid.
    """
    violations: list[str] = []
    vocab = episode.vocabulary

    if episode.k_shot < 1:
        violations.append(f"k_shot {episode.k_shot} < 1")
    if episode.n_way != len(vocab):
        violations.append(
            f"n_way {episode.n_way} != vocabulary size {len(vocab)}"
        )

    dim = episode.dim
    for item in (*episode.support, *episode.queries):
        if item.embedding.size != dim:
            violations.append(
                f"dim mismatch: {item.id} has {item.embedding.size} != {dim}"
            )

    for item in episode.support:
        for label_id in item.labels:
            if label_id >= len(vocab):
                violations.append(
                    f"label id {label_id} out of vocabulary (item {item.id})"
                )

    for label_id, name in enumerate(vocab):
        count = sum(1 for item in episode.support if label_id in item.labels)
        if count < episode.k_shot:
            violations.append(f"label {name}: {count} < {episode.k_shot} shots")

    support_ids = {item.id for item in episode.support}
    for query in episode.queries:
        if query.id in support_ids:
            violations.append(f"overlap: {query.id}")

    seen: set[str] = set()
    for item in (*episode.support, *episode.queries):
        if item.id in seen:
            violations.append(f"duplicate id: {item.id}")
        seen.add(item.id)

    return violations


def stack_embeddings(items: Sequence) -> np.ndarray:
    """Stack item embeddings into a float64 matrix (one row per item)."""
    return np.stack([item.embedding for item in items]).astype(np.float64)
