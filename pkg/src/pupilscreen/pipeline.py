"""Per-eye and per-face scoring: mask post-processing, fit, boundary IoU, verdict.

Failures are data here, not exceptions: a batch run over thousands of faces
must not abort because one eye crop is garbage, so every stage failure is
encoded in the result status.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .biou import BiouScore, biou
from .ellipse import EllipseGeometry, FitReport, fit_ellipse, rasterize_ellipse
from .errors import (
    DegenerateInput,
    ManifestError,
    MaskFormatError,
    NoEllipseSolution,
    SegmentationFailed,
)
from .maskio import read_gray, read_mask
from .raster import fill_holes, largest_component, outer_boundary, segment_pupil_classical

SEGMENTER_EXTERNAL = "external_mask"
SEGMENTER_CLASSICAL = "classical"

STATUS_OK = "ok"
STATUS_SEGMENTATION_FAILED = "segmentation_failed"
STATUS_FIT_FAILED = "fit_failed"

VERDICT_REAL = "real"
VERDICT_GAN = "gan_suspect"
VERDICT_UNDECIDABLE = "undecidable"

# Integer outer-boundary pixel centers sit below the continuous outline by
# ~0.6 px on average over boundary orientations, so an ellipse fitted through
# them under-sizes the region it came from. The scoring raster inflates the
# fitted semi-axes by this depth; the reported fit itself stays raw.
CONTOUR_DEPTH_PX = 0.6


@dataclass(frozen=True)
class PipelineConfig:
    """Scoring parameters; immutable after construction."""

    d: int = 4
    threshold: float = 0.85
    segmenter: str = SEGMENTER_EXTERNAL
    min_pupil_area: int = 25
    dark_percentile: float = 8.0
    require_both_eyes: bool = False

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must be in (0, 1), got {self.threshold}")
        if self.segmenter not in (SEGMENTER_EXTERNAL, SEGMENTER_CLASSICAL):
            raise ValueError(f"unknown segmenter {self.segmenter!r}")
        if self.min_pupil_area < 1:
            raise ValueError(f"min_pupil_area must be >= 1, got {self.min_pupil_area}")
        if not 0.0 < self.dark_percentile < 100.0:
            raise ValueError(
                f"dark_percentile must be in (0, 100), got {self.dark_percentile}"
            )

    def to_json_dict(self) -> dict:
        return {
            "d": self.d,
            "threshold": self.threshold,
            "segmenter": self.segmenter,
            "min_pupil_area": self.min_pupil_area,
            "dark_percentile": self.dark_percentile,
            "require_both_eyes": self.require_both_eyes,
        }


@dataclass(frozen=True)
class PupilScore:
    """Per-eye result; ``biou`` and ``fit`` are present iff status is ok."""

    eye: str
    status: str
    biou: BiouScore | None = None
    fit: FitReport | None = None

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK

    def to_json_dict(self) -> dict:
        return {
            "eye": self.eye,
            "status": self.status,
            "biou": self.biou.to_json_dict() if self.biou is not None else None,
            "fit": self.fit.to_json_dict() if self.fit is not None else None,
        }


@dataclass(frozen=True)
class FaceScore:
    """Two-eye aggregate and the thresholded verdict."""

    face_id: str
    left: PupilScore
    right: PupilScore
    aggregate: float | None
    verdict: str

    def to_json_dict(self) -> dict:
        return {
            "face_id": self.face_id,
            "left": self.left.to_json_dict(),
            "right": self.right.to_json_dict(),
            "aggregate": self.aggregate,
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class PreparedPupil:
    """Segmentation and fit results cached so band scoring can rerun per d."""

    eye: str
    status: str
    predicted: np.ndarray | None = None
    fitted: np.ndarray | None = None
    fit: FitReport | None = None


def prepare_pupil(source, config: PipelineConfig, eye: str = "left") -> PreparedPupil:
    """Run every d-independent stage: segment, post-process, fit, rasterize.

    ``source`` is a 2-D array: a grayscale eye crop when the config selects
    the classical segmenter, otherwise an externally produced pupil mask
    (bool, or integers thresholded at 128). ``None`` marks a missing eye.
    """
    failed = PreparedPupil(eye=eye, status=STATUS_SEGMENTATION_FAILED)
    if source is None:
        return failed
    arr = np.asarray(source)
    if arr.ndim != 2 or arr.size == 0:
        return failed
    if config.segmenter == SEGMENTER_CLASSICAL:
        try:
            mask = segment_pupil_classical(
                arr,
                dark_percentile=config.dark_percentile,
                min_area=config.min_pupil_area,
            )
        except SegmentationFailed:
            return failed
    else:
        mask = arr if arr.dtype == bool else arr >= 128
    if not mask.any():
        return failed
    predicted = fill_holes(largest_component(mask))
    if int(predicted.sum()) < config.min_pupil_area:
        return failed
    contour = outer_boundary(predicted)
    try:
        fit = fit_ellipse(contour)
    except (DegenerateInput, NoEllipseSolution):
        return replace(failed, status=STATUS_FIT_FAILED, predicted=predicted)
    scoring_geometry = EllipseGeometry(
        center_x=fit.geometry.center_x,
        center_y=fit.geometry.center_y,
        semi_major=fit.geometry.semi_major + CONTOUR_DEPTH_PX,
        semi_minor=fit.geometry.semi_minor + CONTOUR_DEPTH_PX,
        rotation=fit.geometry.rotation,
    )
    fitted = rasterize_ellipse(scoring_geometry, width=predicted.shape[1], height=predicted.shape[0])
    return PreparedPupil(eye=eye, status=STATUS_OK, predicted=predicted, fitted=fitted, fit=fit)


def band_score(prepared: PreparedPupil, d: int) -> PupilScore:
    """Finish scoring a prepared pupil at band distance ``d``."""
    if prepared.status != STATUS_OK:
        return PupilScore(eye=prepared.eye, status=prepared.status)
    score = biou(prepared.fitted, prepared.predicted, d)
    return PupilScore(eye=prepared.eye, status=STATUS_OK, biou=score, fit=prepared.fit)


def score_pupil(source, config: PipelineConfig, eye: str = "left") -> PupilScore:
    """Score one pupil: mask in (or eye crop in classical mode), BIoU out."""
    return band_score(prepare_pupil(source, config, eye=eye), config.d)


def _aggregate(left: PupilScore, right: PupilScore, config: PipelineConfig) -> float | None:
    values = [s.biou.value for s in (left, right) if s.ok]
    if not values:
        return None
    if config.require_both_eyes and len(values) < 2:
        return None
    return sum(values) / len(values)


def score_face(left, right, config: PipelineConfig, face_id: str = "") -> FaceScore:
    """Score both eyes and aggregate to a face verdict.

    The aggregate is the mean BIoU over the measurable eyes; with
    ``require_both_eyes`` off (the default) a single good eye decides alone.
    A face with no measurable eye is undecidable rather than an error.
    """
    left_score = score_pupil(left, config, eye="left")
    right_score = score_pupil(right, config, eye="right")
    return _verdict(face_id, left_score, right_score, config)


def _verdict(face_id, left_score, right_score, config) -> FaceScore:
    aggregate = _aggregate(left_score, right_score, config)
    if aggregate is None:
        verdict = VERDICT_UNDECIDABLE
    elif aggregate >= config.threshold:
        verdict = VERDICT_REAL
    else:
        verdict = VERDICT_GAN
    return FaceScore(
        face_id=face_id,
        left=left_score,
        right=right_score,
        aggregate=aggregate,
        verdict=verdict,
    )


@dataclass(frozen=True)
class ManifestEntry:
    """One face row of a dataset manifest."""

    face_id: str
    label: str
    left_path: Path | None
    right_path: Path | None


MANIFEST_COLUMNS = ("face_id", "label", "left_path", "right_path")
MANIFEST_LABELS = ("real", "gan", "unknown")


def read_manifest(path) -> list[ManifestEntry]:
    """Read a face manifest CSV; relative paths resolve against the CSV's directory."""
    path = Path(path)
    base = path.parent
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    reader = csv.DictReader(text.splitlines())
    if reader.fieldnames is None or tuple(reader.fieldnames) != MANIFEST_COLUMNS:
        raise ManifestError(
            f"manifest header must be {','.join(MANIFEST_COLUMNS)}, got {reader.fieldnames}"
        )
    entries = []
    for line_no, row in enumerate(reader, start=2):
        if None in row or any(row[k] is None for k in MANIFEST_COLUMNS):
            raise ManifestError(f"line {line_no}: wrong number of columns")
        label = (row["label"] or "").strip()
        if label not in MANIFEST_LABELS:
            raise ManifestError(f"line {line_no}: unknown label {label!r}")
        left = (row["left_path"] or "").strip()
        right = (row["right_path"] or "").strip()
        if not left and not right:
            raise ManifestError(f"line {line_no}: both eye paths are empty")
        entries.append(
            ManifestEntry(
                face_id=row["face_id"].strip(),
                label=label,
                left_path=base / left if left else None,
                right_path=base / right if right else None,
            )
        )
    if not entries:
        raise ManifestError(f"manifest {path} has no data rows")
    return entries


def _load_eye(path: Path | None, config: PipelineConfig):
    if path is None:
        return None
    try:
        if config.segmenter == SEGMENTER_CLASSICAL:
            return read_gray(path)
        return read_mask(path)
    except (OSError, MaskFormatError):
        return None  # unreadable eye becomes a per-eye failure, not an abort


def prepare_face(entry: ManifestEntry, config: PipelineConfig) -> tuple[PreparedPupil, PreparedPupil]:
    """Load and prepare both eyes of a manifest entry."""
    left = prepare_pupil(_load_eye(entry.left_path, config), config, eye="left")
    right = prepare_pupil(_load_eye(entry.right_path, config), config, eye="right")
    return left, right


def face_from_prepared(
    entry: ManifestEntry,
    prepared: tuple[PreparedPupil, PreparedPupil],
    config: PipelineConfig,
    d: int | None = None,
) -> FaceScore:
    """Band-score a prepared face, optionally overriding the band distance."""
    band_d = config.d if d is None else d
    left = band_score(prepared[0], band_d)
    right = band_score(prepared[1], band_d)
    return _verdict(entry.face_id, left, right, config)


def score_face_files(entry: ManifestEntry, config: PipelineConfig) -> FaceScore:
    """Score one manifest entry from its files."""
    return face_from_prepared(entry, prepare_face(entry, config), config)
