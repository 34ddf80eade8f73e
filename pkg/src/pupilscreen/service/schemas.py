"""Request/response models for the scoring service.

Rasters travel as base64-encoded PGM or PNG file bytes, the same formats
the CLI reads, so a client can post exactly what it has on disk.
"""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..pipeline import SEGMENTER_EXTERNAL


class HealthResponse(BaseModel):
    status: str
    version: str


class ErrorResponse(BaseModel):
    error: str
    detail: str


class SegmentRequest(BaseModel):
    image_b64: str = Field(description="base64 PGM/PNG eye crop")
    dark_percentile: float = Field(default=8.0, gt=0.0, lt=100.0)
    min_pupil_area: int = Field(default=25, ge=1)


class SegmentResponse(BaseModel):
    mask_b64: str = Field(description="base64 P5 PGM pupil mask")
    area_px: int
    width: int
    height: int


class FitRequest(BaseModel):
    mask_b64: str = Field(description="base64 PGM/PNG pupil mask")


class FitResponse(BaseModel):
    conic: list[float]
    center: list[float]
    semi_major: float
    semi_minor: float
    rotation_rad: float
    rms: float
    n_points: int


class BiouModel(BaseModel):
    value: float
    d: int
    intersection_px: int
    union_px: int


class PupilScoreModel(BaseModel):
    eye: str
    status: str
    biou: Optional[BiouModel] = None
    fit: Optional[FitResponse] = None


class ScoreRequest(BaseModel):
    left_b64: Optional[str] = Field(default=None, description="base64 left-eye input")
    right_b64: Optional[str] = Field(default=None, description="base64 right-eye input")
    face_id: str = ""
    d: int = Field(default=4, ge=1)
    threshold: float = Field(default=0.85, gt=0.0, lt=1.0)
    segmenter: Literal["external_mask", "classical"] = SEGMENTER_EXTERNAL
    min_pupil_area: int = Field(default=25, ge=1)
    dark_percentile: float = Field(default=8.0, gt=0.0, lt=100.0)
    require_both_eyes: bool = False


class ScoreResponse(BaseModel):
    face_id: str
    left: PupilScoreModel
    right: PupilScoreModel
    aggregate: Optional[float]
    verdict: str
    config: dict
