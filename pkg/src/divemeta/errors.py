"""Exception hierarchy.  Every error is a ``ValueError`` subclass so callers
that only care about bad input can catch one thing."""


class DiveMetaError(ValueError):
    pass


class EmptyInput(DiveMetaError):
    pass


class NonPositiveSize(DiveMetaError):
    pass


class QuartileOrderViolation(DiveMetaError):
    pass


class DuplicateStudyId(DiveMetaError):
    pass


class DominantStudy(DiveMetaError):
    pass


class InvalidAlpha(DiveMetaError):
    pass


class ZeroSE(DiveMetaError):
    pass


class LengthMismatch(DiveMetaError):
    pass


class NonPositiveVariance(DiveMetaError):
    pass


class NeedTwoStudies(DiveMetaError):
    pass


class InvalidParams(DiveMetaError):
    pass


class ProbabilityOutOfRange(DiveMetaError):
    pass


class ZeroDensityAtMedian(DiveMetaError):
    pass


class UnsupportedQuantiles(DiveMetaError):
    pass


class OptimizerDiverged(DiveMetaError):
    pass


class AllFamiliesFailed(DiveMetaError):
    pass


class NotQeEligible(DiveMetaError):
    pass


class InsufficientQeEligibleStudies(DiveMetaError):
    pass


class InfeasibleBaseline(DiveMetaError):
    pass


class ZeroTruthDenominator(DiveMetaError):
    pass


class MalformedCsv(DiveMetaError):
    pass


class HeaderMismatch(DiveMetaError):
    pass


class ConfigError(DiveMetaError):
    pass


class ReplicateError(DiveMetaError):
    """A failure inside one simulation replicate; ``replicate`` is its index."""

    def __init__(self, replicate, cause):
        super().__init__(f"replicate {replicate}: {type(cause).__name__}: {cause}")
        self.replicate = replicate
        self.cause = cause
