"""Exception hierarchy for mvdiff.

Every error raised on purpose by this package derives from MvdiffError so
callers (and the CLI) can report a machine-readable category.
"""


class MvdiffError(Exception):
    """Base class for all mvdiff errors."""

    @property
    def category(self):
        return type(self).__name__


# graph construction
class NonPositiveSigma(MvdiffError):
    pass


class NonFiniteFeature(MvdiffError):
    pass


class AsymmetricInput(MvdiffError):
    pass


class NegativeEntry(MvdiffError):
    pass


# linear algebra / checks
class DimensionMismatch(MvdiffError):
    pass


class SizeLimitExceeded(MvdiffError):
    pass


class EigensolverFailure(MvdiffError):
    pass


# model training
class EmptyViewList(MvdiffError):
    pass


class ViewRowMismatch(MvdiffError):
    pass


class NonFiniteLoss(MvdiffError):
    pass


class NonFiniteGradient(MvdiffError):
    pass


# clustering
class TooManyClusters(MvdiffError):
    pass


class EmptyInput(MvdiffError):
    pass


class NonSquare(MvdiffError):
    pass


class NonFinite(MvdiffError):
    pass


# metrics
class LengthMismatch(MvdiffError):
    pass


class EmptyPartition(MvdiffError):
    pass


# dataset ingestion
class NoViewsFound(MvdiffError):
    pass


class RowCountMismatch(MvdiffError):
    pass


class MalformedNumber(MvdiffError):
    pass


class MissingK(MvdiffError):
    pass
