"""Score the geometric regularity of segmented pupils to flag GAN faces.

Real pupils are nearly elliptical; GAN-generated ones tend to have
irregular boundaries. The pipeline keeps the largest mask component, fits
an ellipse to its outer boundary by direct constrained least squares, and
scores the boundary IoU between the mask and the fitted ellipse: high means
regular (real), low means irregular (suspect).
"""

__version__ = "0.1.0"

from .biou import BiouScore, biou, iou
from .ellipse import (
    ConicParams,
    EllipseGeometry,
    FitReport,
    conic_to_geometry,
    fit_ellipse,
    geometry_to_conic,
    rasterize_ellipse,
)
from .errors import (
    BothEmpty,
    DegenerateInput,
    DimensionMismatch,
    EmptyMask,
    InvalidSpec,
    ManifestError,
    MaskFormatError,
    NoEllipseSolution,
    NotAnEllipse,
    OneClassOnly,
    PupilScreenError,
    SegmentationFailed,
)
from .evaluation import (
    EvaluationResult,
    LabeledScore,
    RocCurve,
    SynthSpec,
    evaluate_manifest,
    generate_synth_corpus,
    roc,
    score_histogram,
    sweep_d,
    trapezoid_auc,
    youden_threshold,
)
from .maskio import decode_gray, decode_mask, encode_pgm, read_gray, read_mask, write_mask
from .pipeline import (
    FaceScore,
    ManifestEntry,
    PipelineConfig,
    PupilScore,
    read_manifest,
    score_face,
    score_face_files,
    score_pupil,
)
from .raster import (
    BoundaryBand,
    boundary_band,
    fill_holes,
    largest_component,
    outer_boundary,
    segment_pupil_classical,
)

__all__ = [
    "__version__",
    "BiouScore", "biou", "iou",
    "ConicParams", "EllipseGeometry", "FitReport",
    "conic_to_geometry", "fit_ellipse", "geometry_to_conic", "rasterize_ellipse",
    "BothEmpty", "DegenerateInput", "DimensionMismatch", "EmptyMask",
    "InvalidSpec", "ManifestError", "MaskFormatError", "NoEllipseSolution",
    "NotAnEllipse", "OneClassOnly", "PupilScreenError", "SegmentationFailed",
    "EvaluationResult", "LabeledScore", "RocCurve", "SynthSpec",
    "evaluate_manifest", "generate_synth_corpus", "roc", "score_histogram",
    "sweep_d", "trapezoid_auc", "youden_threshold",
    "decode_gray", "decode_mask", "encode_pgm", "read_gray", "read_mask", "write_mask",
    "FaceScore", "ManifestEntry", "PipelineConfig", "PupilScore",
    "read_manifest", "score_face", "score_face_files", "score_pupil",
    "BoundaryBand", "boundary_band", "fill_holes", "largest_component",
    "outer_boundary", "segment_pupil_classical",
]
