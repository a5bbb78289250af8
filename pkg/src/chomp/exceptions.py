"""Exception types shared across the package."""


class SdrError(Exception):
    """Base class for all errors raised by this package."""


class NotPositiveDefinite(SdrError):
    """A matrix expected to be positive definite has a non-positive pivot."""

    def __init__(self, message, pivot=None, index=None):
        super().__init__(message)
        self.pivot = pivot
        self.index = index


class DimensionMismatch(SdrError):
    """Array shapes are inconsistent with each other or with a requested size."""


class RankDeficient(SdrError):
    """A matrix expected to have full column rank is rank deficient."""


class ZeroVarianceColumn(SdrError):
    def __init__(self, column):
        super().__init__(f"column {column!r} has zero variance; cannot standardize")
        self.column = column


class InvalidSliceCount(SdrError):
    pass


class EmptySlice(SdrError):
    pass


class SliceTooSmall(SdrError):
    pass


class NonPositiveEigenvalue(SdrError):
    pass


class NonFiniteInput(SdrError):
    pass


class ZeroReference(SdrError):
    """The reference estimate for the projection criterion is the zero vector."""


class AllZeroFits(SdrError):
    """Every candidate tuning value produced the zero vector."""


class AllDimensionsZero(SdrError):
    """Every fitted dimension of the subspace is the zero vector."""


class FoldTooSmall(SdrError):
    pass


class PatternTooWide(SdrError):
    pass


class ConfigError(SdrError):
    """A scenario configuration failed validation."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class InputDataError(SdrError):
    """A data CSV could not be read or contains ill-typed values."""


class ReplicationInterrupt(SdrError):
    """A simulation run was interrupted; carries the partially aggregated table."""

    def __init__(self, partial):
        super().__init__("interrupted; partial results available")
        self.partial = partial
