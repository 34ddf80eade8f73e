"""FastAPI application wrapping per-item scoring.

Stage failures inside scoring are data and come back as statuses in a 200
response; undecodable payloads and degenerate inputs are 400s with a
machine-readable error body.
"""
from __future__ import annotations

import base64
import binascii

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..ellipse import fit_ellipse
from ..errors import MaskFormatError, PupilScreenError
from ..maskio import decode_gray, decode_mask, encode_pgm
from ..pipeline import SEGMENTER_CLASSICAL, PipelineConfig, score_face
from ..raster import fill_holes, largest_component, outer_boundary, segment_pupil_classical
from .schemas import (
    ErrorResponse,
    FitRequest,
    FitResponse,
    HealthResponse,
    ScoreRequest,
    ScoreResponse,
    SegmentRequest,
    SegmentResponse,
)

app = FastAPI(
    title="pupilscreen",
    version=__version__,
    description="Scores the geometric regularity of segmented pupils to flag GAN-generated faces.",
)

_ERROR_RESPONSES = {400: {"model": ErrorResponse}}


@app.exception_handler(PupilScreenError)
async def _package_error(request: Request, exc: PupilScreenError) -> JSONResponse:
    return JSONResponse(
        status_code=400,
        content={"error": type(exc).__name__, "detail": str(exc)},
    )


def _decode_b64(payload: str) -> bytes:
    try:
        return base64.b64decode(payload, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise MaskFormatError(f"payload is not valid base64: {exc}") from exc


@app.get("/v1/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/v1/segment", response_model=SegmentResponse, responses=_ERROR_RESPONSES)
def segment(req: SegmentRequest) -> SegmentResponse:
    eye = decode_gray(_decode_b64(req.image_b64))
    mask = segment_pupil_classical(
        eye, dark_percentile=req.dark_percentile, min_area=req.min_pupil_area
    )
    return SegmentResponse(
        mask_b64=base64.b64encode(encode_pgm(mask)).decode("ascii"),
        area_px=int(mask.sum()),
        width=mask.shape[1],
        height=mask.shape[0],
    )


@app.post("/v1/fit", response_model=FitResponse, responses=_ERROR_RESPONSES)
def fit(req: FitRequest) -> FitResponse:
    mask = decode_mask(_decode_b64(req.mask_b64))
    processed = fill_holes(largest_component(mask))
    report = fit_ellipse(outer_boundary(processed))
    return FitResponse(**report.to_json_dict())


@app.post("/v1/score", response_model=ScoreResponse, responses=_ERROR_RESPONSES)
def score(req: ScoreRequest) -> ScoreResponse:
    config = PipelineConfig(
        d=req.d,
        threshold=req.threshold,
        segmenter=req.segmenter,
        min_pupil_area=req.min_pupil_area,
        dark_percentile=req.dark_percentile,
        require_both_eyes=req.require_both_eyes,
    )
    decode = decode_gray if config.segmenter == SEGMENTER_CLASSICAL else decode_mask
    left = decode(_decode_b64(req.left_b64)) if req.left_b64 is not None else None
    right = decode(_decode_b64(req.right_b64)) if req.right_b64 is not None else None
    if left is None and right is None:
        raise MaskFormatError("score needs at least one of left_b64/right_b64")
    face = score_face(left, right, config, face_id=req.face_id)
    payload = face.to_json_dict()
    payload["config"] = config.to_json_dict()
    return ScoreResponse(**payload)
