"""Label-combination prototype engine.

Enumerates every label combination present in a support set's power sets,
builds one prototype per combination (the mean embedding of the items
whose labels contain it), and classifies queries by nearest prototype
under cosine distance, predicting the largest combination attached to the
winner.

Combinations sharing the same contributing-item set ("extent") have
identical prototypes, so the index stores one prototype per distinct
extent instead of one per combination. `classify` searches that
deduplicated index; `classify_original` brute-forces the full combination
list and serves as the reference implementation. Both are guaranteed to
return the same label set for every query.

All distance and averaging arithmetic runs through shared float64 kernels
whose per-row results do not depend on how many rows are processed
together, which is what makes the guarantee exact rather than
approximate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .core import LabelSet, QueryItem, SupportItem, stack_embeddings
from .errors import (
    ClassNotInSupportError,
    DimensionMismatchError,
    EmptyIndexError,
    EmptySupportError,
    LabelCapExceededError,
    ZeroNormVectorError,
)

# 2^20 subsets (~1M) is the worst case a single item may contribute.
DEFAULT_MAX_LABELS_PER_ITEM = 20


@dataclass(frozen=True, order=True)
class Extent:
    """Ascending indices of the support items contributing to a prototype."""

    indices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(self.indices))
        if not self.indices:
            raise ValueError("extent must be non-empty")
        if any(i < 0 for i in self.indices):
            raise ValueError("extent indices must be non-negative")
        if any(a >= b for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("extent indices must be strictly ascending")

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True, eq=False)
class LCClassSet:
    """All label combinations of a support set, with their extents.

    `classes` is deterministically ordered by (cardinality, ascending id
    tuple); `extents` maps each class to the support items whose label
    sets contain it.
    """

    classes: tuple[LabelSet, ...]
    extents: dict

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self) -> Iterator[LabelSet]:
        return iter(self.classes)

    def extent_for(self, lc_class: LabelSet) -> Extent:
        try:
            return self.extents[lc_class]
        except KeyError:
            raise ClassNotInSupportError(
                f"no support item contains {lc_class!r}"
            ) from None


@dataclass(frozen=True, eq=False)
class UniquePrototype:
    """One deduplicated prototype: an extent, its mean embedding, and the
    group of label combinations sharing that extent."""

    extent: Extent
    vector: np.ndarray
    classes: tuple[LabelSet, ...]
    best_class: LabelSet

    def __post_init__(self):
        if not self.classes:
            raise ValueError("prototype must carry at least one class")
        if self.best_class not in self.classes:
            raise ValueError("best_class must be one of the grouped classes")


class PrototypeIndex:
    """Immutable search structure over unique prototypes.

    Groups partition the full combination set: every combination belongs
    to exactly one prototype, and the prototype count never exceeds the
    combination count.
    """

    def __init__(self, prototypes: Sequence[UniquePrototype], total_classes: int):
        prototypes = tuple(prototypes)
        if prototypes:
            dims = {p.vector.size for p in prototypes}
            if len(dims) != 1:
                raise DimensionMismatchError("prototype vectors have mixed dims")
            extents = {p.extent for p in prototypes}
            if len(extents) != len(prototypes):
                raise ValueError("prototype extents must be pairwise distinct")
        self.prototypes = prototypes
        self.total_classes = int(total_classes)
        self.dim = prototypes[0].vector.size if prototypes else 0
        if prototypes:
            matrix = np.stack([p.vector for p in prototypes])
            matrix.setflags(write=False)
            norms = _row_norms(matrix)
            norms.setflags(write=False)
        else:
            matrix = np.empty((0, 0))
            norms = np.empty(0)
        self._matrix = matrix
        self._norms = norms

    def __len__(self) -> int:
        return len(self.prototypes)

    @property
    def m(self) -> int:
        """Number of unique prototypes."""
        return len(self.prototypes)


@dataclass(frozen=True, eq=False)
class Prediction:
    """Classification outcome for one query.

    `prototype_extent` is None when the prediction came from the
    brute-force path, which only sees (class, vector) pairs.
    """

    query_id: str
    labels: LabelSet
    distance: float
    prototype_extent: Extent | None = None

    def __post_init__(self):
        if not self.labels:
            raise ValueError("prediction must carry at least one label")


# ---------------------------------------------------------------------------
# float kernels
#
# einsum reductions are used everywhere a result must be bit-reproducible:
# each output element is a pure function of its own row, independent of
# how many other rows share the call. BLAS matmul does not have that
# property.


def _row_norms(matrix: np.ndarray) -> np.ndarray:
    return np.sqrt(np.einsum("ij,ij->i", matrix, matrix))


def _mean_rows(embs64: np.ndarray, indices: Sequence[int]) -> np.ndarray:
    vec = embs64[list(indices)].sum(axis=0) / len(indices)
    vec.setflags(write=False)
    return vec


def _query_vector(query: QueryItem, dim: int) -> tuple[np.ndarray, float]:
    if query.embedding.size != dim:
        raise DimensionMismatchError(
            f"query {query.id!r} has dim {query.embedding.size}, expected {dim}"
        )
    q64 = query.embedding.astype(np.float64)
    qnorm = float(np.sqrt(np.einsum("j,j->", q64, q64)))
    if qnorm == 0.0:
        raise ZeroNormVectorError(f"query {query.id!r} has zero norm")
    return q64, qnorm


def _cosine_distances(
    matrix: np.ndarray, norms: np.ndarray, q64: np.ndarray, qnorm: float
) -> np.ndarray:
    return 1.0 - np.einsum("ij,j->i", matrix, q64) / (norms * qnorm)


def cosine_distance(a, b) -> float:
    """Cosine distance 1 - a.b/(|a||b|), accumulated at 64-bit.

    Exactly symmetric in its arguments; raises ZeroNormVectorError when
    either norm is zero.
    """
    a64 = np.asarray(a, dtype=np.float64)
    b64 = np.asarray(b, dtype=np.float64)
    if a64.shape != b64.shape or a64.ndim != 1:
        raise DimensionMismatchError(
            f"cosine distance needs equal-length vectors, got {a64.shape} and {b64.shape}"
        )
    na = np.sqrt(np.einsum("j,j->", a64, a64))
    nb = np.sqrt(np.einsum("j,j->", b64, b64))
    if na == 0.0 or nb == 0.0:
        raise ZeroNormVectorError("cosine distance undefined for zero-norm vector")
    return float(1.0 - np.einsum("j,j->", a64, b64) / (na * nb))


# ---------------------------------------------------------------------------
# enumeration


def _iter_submasks(mask: int) -> Iterator[int]:
    """Yield every non-empty submask of `mask` (standard descending walk)."""
    sub = mask
    while sub:
        yield sub
        sub = (sub - 1) & mask


def _check_support(support: Sequence[SupportItem], max_labels_per_item: int) -> None:
    if not support:
        raise EmptySupportError("support set is empty")
    for item in support:
        count = len(item.labels)
        if count > max_labels_per_item:
            raise LabelCapExceededError(item.id, count, max_labels_per_item)


def enumerate_lc_classes(
    support: Sequence[SupportItem],
    max_labels_per_item: int = DEFAULT_MAX_LABELS_PER_ITEM,
) -> LCClassSet:
    """Every non-empty subset of any support item's label set.

    Extents fall out of the walk for free: item i contributes submask c
    exactly when c is a subset of item i's labels, which is the extent
    membership condition. Iterating items in ascending index order keeps
    each extent sorted.
    """
    _check_support(support, max_labels_per_item)
    extent_lists: dict[int, list[int]] = {}
    for i, item in enumerate(support):
        for sub in _iter_submasks(item.labels.mask):
            extent_lists.setdefault(sub, []).append(i)
    classes = sorted((LabelSet(mask) for mask in extent_lists), key=LabelSet.sort_key)
    extents = {c: Extent(tuple(extent_lists[c.mask])) for c in classes}
    return LCClassSet(classes=tuple(classes), extents=extents)


def extent_of(lc_class: LabelSet, support: Sequence[SupportItem]) -> Extent:
    """Indices of exactly the support items whose labels contain lc_class.

    Independent of the enumeration walk: a direct subset scan, used by the
    brute-force path and as a cross-check of the enumerated extents.
    """
    if not lc_class:
        raise ClassNotInSupportError("the empty combination has no extent")
    indices = tuple(
        i for i, item in enumerate(support) if lc_class.issubset(item.labels)
    )
    if not indices:
        raise ClassNotInSupportError(f"no support item contains {lc_class!r}")
    return Extent(indices)


# ---------------------------------------------------------------------------
# prototype construction


def build_prototypes_original(
    support: Sequence[SupportItem],
    max_labels_per_item: int = DEFAULT_MAX_LABELS_PER_ITEM,
) -> list[tuple[LabelSet, np.ndarray]]:
    """One (class, mean-embedding) pair per label combination.

    The brute-force construction: every class gets its own averaging pass
    over a freshly scanned extent, with no grouping. Output order follows
    the canonical class order.
    """
    lc_classes = enumerate_lc_classes(support, max_labels_per_item)
    embs64 = stack_embeddings(support)
    out = []
    for lc_class in lc_classes:
        extent = extent_of(lc_class, support)
        out.append((lc_class, _mean_rows(embs64, extent.indices)))
    return out


def build_prototype_index(
    support: Sequence[SupportItem],
    max_labels_per_item: int = DEFAULT_MAX_LABELS_PER_ITEM,
) -> PrototypeIndex:
    """Group label combinations by extent and average each extent once.

    Classes sharing an extent share one prototype; each group precomputes
    its max-cardinality representative (ties broken by the
    lexicographically smallest ascending id tuple).
    """
    lc_classes = enumerate_lc_classes(support, max_labels_per_item)
    embs64 = stack_embeddings(support)
    groups: dict[Extent, list[LabelSet]] = {}
    for lc_class in lc_classes:
        groups.setdefault(lc_classes.extents[lc_class], []).append(lc_class)
    prototypes = []
    for extent in sorted(groups):
        members = sorted(groups[extent], key=LabelSet.sort_key)
        best = min(members, key=lambda c: (-len(c), c.ids()))
        prototypes.append(
            UniquePrototype(
                extent=extent,
                vector=_mean_rows(embs64, extent.indices),
                classes=tuple(members),
                best_class=best,
            )
        )
    return PrototypeIndex(prototypes, total_classes=len(lc_classes))


# ---------------------------------------------------------------------------
# classification


def classify(query: QueryItem, index: PrototypeIndex) -> Prediction:
    """Nearest unique prototype under cosine distance; predicts the
    winner's max-cardinality class.

    Exact-distance ties across prototypes resolve by larger best-class
    cardinality, then lexicographically smaller id tuple, then smaller
    extent. Pure function: identical inputs give identical predictions.
    """
    if len(index) == 0:
        raise EmptyIndexError("prototype index is empty")
    q64, qnorm = _query_vector(query, index.dim)
    if np.any(index._norms == 0.0):
        raise ZeroNormVectorError("index contains a zero-norm prototype")
    dists = _cosine_distances(index._matrix, index._norms, q64, qnorm)
    dmin = dists.min()
    ties = np.flatnonzero(dists == dmin)
    if len(ties) == 1:
        winner = index.prototypes[ties[0]]
    else:
        winner = min(
            (index.prototypes[i] for i in ties),
            key=lambda p: (-len(p.best_class), p.best_class.ids(), p.extent.indices),
        )
    return Prediction(
        query_id=query.id,
        labels=winner.best_class,
        distance=float(dmin),
        prototype_extent=winner.extent,
    )


class OriginalClassifier:
    """Brute-force nearest-prototype search over the full combination list.

    Prestacks the (class, vector) pairs so repeated queries don't pay the
    assembly cost; `classify_original` wraps it for one-shot use.
    """

    def __init__(self, prototypes: Sequence[tuple[LabelSet, np.ndarray]]):
        if not prototypes:
            raise EmptyIndexError("prototype list is empty")
        self.classes = tuple(c for c, _ in prototypes)
        matrix = np.stack([v for _, v in prototypes]).astype(np.float64)
        dims = {v.size for _, v in prototypes}
        if len(dims) != 1:
            raise DimensionMismatchError("prototype vectors have mixed dims")
        matrix.setflags(write=False)
        self._matrix = matrix
        self._norms = _row_norms(matrix)
        self.dim = matrix.shape[1]

    def classify(self, query: QueryItem) -> Prediction:
        q64, qnorm = _query_vector(query, self.dim)
        if np.any(self._norms == 0.0):
            raise ZeroNormVectorError("prototype list contains a zero-norm vector")
        dists = _cosine_distances(self._matrix, self._norms, q64, qnorm)
        dmin = dists.min()
        ties = np.flatnonzero(dists == dmin)
        labels = min(
            (self.classes[i] for i in ties),
            key=lambda c: (-len(c), c.ids()),
        )
        return Prediction(query_id=query.id, labels=labels, distance=float(dmin))


def classify_original(
    query: QueryItem, prototypes: Sequence[tuple[LabelSet, np.ndarray]]
) -> Prediction:
    """Nearest prototype over all combinations; the reference against
    which `classify` is verified.

    Among exact-distance ties (including bit-identical vectors): max
    cardinality, then lexicographically smallest id tuple.
    """
    return OriginalClassifier(prototypes).classify(query)
