"""Exception types raised across the package.

Everything inherits from LcprotoError so callers (and the CLI) can catch
one base class. Data problems that are *reported* rather than raised
(episode validation) return violation lists instead of using these.
"""

from __future__ import annotations


class LcprotoError(Exception):
    """Base class for all errors raised by this package."""


# ---------------------------------------------------------------------------
# prototype engine


class EmptySupportError(LcprotoError):
    """A support set was empty where at least one item is required."""


class LabelCapExceededError(LcprotoError):
    """A support item carries more labels than the configured cap."""

    def __init__(self, item_id: str, count: int, cap: int):
        super().__init__(
            f"item {item_id!r} has {count} labels, exceeding the cap of {cap}"
        )
        self.item_id = item_id
        self.count = count
        self.cap = cap


class ClassNotInSupportError(LcprotoError):
    """No support item's label set contains the requested label combination."""


class ZeroNormVectorError(LcprotoError):
    """Cosine distance is undefined for a zero-norm vector."""


class EmptyIndexError(LcprotoError):
    """Classification was attempted against an index with no prototypes."""


class DimensionMismatchError(LcprotoError):
    """Vector or matrix dimensions do not agree."""


# ---------------------------------------------------------------------------
# episode sampler


class InsufficientItemsError(LcprotoError):
    """A label does not have enough carrier items to satisfy the request."""

    def __init__(self, label: str, have: int, need: int):
        super().__init__(f"label {label!r}: {have} < {need} eligible items")
        self.label = label
        self.have = have
        self.need = need


class MissingEmbeddingError(LcprotoError):
    """An item id has no vector in the embedding store."""

    def __init__(self, item_id: str):
        super().__init__(f"no embedding stored for item {item_id!r}")
        self.item_id = item_id


class NotEnoughEligibleLabelsError(LcprotoError):
    """Fewer labels satisfy the eligibility rule than were requested."""

    def __init__(self, need: int, have: int):
        super().__init__(f"requested {need} labels but only {have} are eligible")
        self.need = need
        self.have = have


# ---------------------------------------------------------------------------
# probe training


class EmptyDatasetError(LcprotoError):
    """Training or validation data was empty."""


# ---------------------------------------------------------------------------
# metrics


class EmptyInputError(LcprotoError):
    """A metric received no predictions to score."""


class NoValidLabelsError(LcprotoError):
    """Every label was excluded by the metric's validity rule."""


# ---------------------------------------------------------------------------
# file formats and synthetic data


class BadMagicError(LcprotoError):
    """File does not start with the expected magic bytes."""


class UnsupportedVersionError(LcprotoError):
    """File declares a format version this reader does not support."""

    def __init__(self, version: int):
        super().__init__(f"unsupported format version {version}")
        self.version = version


class CorruptRecordError(LcprotoError):
    """File contents are inconsistent with the declared structure."""

    def __init__(self, offset: int, reason: str):
        super().__init__(f"corrupt record at byte {offset}: {reason}")
        self.offset = offset
        self.reason = reason


class NonFiniteValueError(LcprotoError):
    """A vector contains NaN or infinity."""

    def __init__(self, item_id: str):
        super().__init__(f"non-finite value in vector for {item_id!r}")
        self.item_id = item_id


class ManifestError(LcprotoError):
    """A manifest line failed to parse or validate."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"manifest line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class SpecInfeasibleError(LcprotoError):
    """A synthetic-data spec cannot satisfy its own coverage requirements."""


# ---------------------------------------------------------------------------
# benchmark


class EquivalenceViolationError(LcprotoError):
    """The optimized and original classifiers disagreed on a query."""

    def __init__(self, context: str, query_id: str):
        super().__init__(
            f"optimized/original prediction mismatch for query {query_id!r} ({context})"
        )
        self.context = context
        self.query_id = query_id
