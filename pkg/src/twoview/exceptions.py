"""Exception hierarchy for the twoview package."""


class TwoViewError(Exception):
    """Base class for all errors raised by twoview."""


class ZeroVectorError(TwoViewError):
    """An operation that requires a nonzero vector received the zero vector."""


class SearchExhaustedError(TwoViewError):
    """A randomized search ran out of retries (a measure-zero event)."""


class AtCenterError(TwoViewError):
    """A world point coincides with the camera center, so its image is undefined."""


class NotFiniteError(TwoViewError):
    """A camera expected to be finite has a singular left 3x3 block."""


class CoincidentCamerasError(TwoViewError):
    """An operation requiring distinct camera centers got b = 0."""


class IrregularPairError(TwoViewError):
    """Exactly one of the two image points is an epipole; triangulation is impossible."""


class EpipolarViolatedError(TwoViewError):
    """The pair does not satisfy the epipolar constraint for the given geometry."""


class RankViolationError(TwoViewError):
    """A matrix failed its certified rank requirement."""


class WitnessInvalidError(TwoViewError):
    """A claimed certificate failed post-hoc verification."""


class NotReconstructableError(TwoViewError):
    """No reconstruction certificate is available for the correspondences."""


class ConfigConflictError(TwoViewError):
    """A synthetic scene configuration combines incompatible options."""
