"""Exception types shared across the package."""


class PupilScreenError(Exception):
    """Base class for all pupilscreen errors."""


class EmptyMask(PupilScreenError):
    """A mask operation needs at least one foreground pixel."""


class SegmentationFailed(PupilScreenError):
    """The classical segmenter produced no usable pupil candidate."""


class DegenerateInput(PupilScreenError):
    """Too few distinct points, or points collinear within tolerance."""


class NoEllipseSolution(PupilScreenError):
    """The constrained fit yielded no coefficient vector on the ellipse branch."""


class NotAnEllipse(PupilScreenError):
    """Conic coefficients do not describe a real ellipse."""


class DimensionMismatch(PupilScreenError):
    """Two masks being compared have different raster dimensions."""


class BothEmpty(PupilScreenError):
    """Overlap score is undefined because both operand sets are empty."""


class OneClassOnly(PupilScreenError):
    """ROC/AUC needs at least one score from each class."""


class InvalidSpec(PupilScreenError):
    """Synthetic-corpus parameters are inconsistent or out of range."""


class ManifestError(PupilScreenError):
    """Dataset manifest is missing, malformed, or has bad columns."""


class MaskFormatError(PupilScreenError):
    """Raster file bytes are not a supported PGM/PNG image."""
