"""Boundary IoU and plain IoU between two masks of equal dimensions.

Boundary IoU restricts each mask to the pixels within Euclidean distance
``d`` of its own outer boundary before intersecting, so the score reacts to
boundary shape rather than interior bulk. With ``d`` at least the raster
diagonal it degenerates to plain IoU.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BothEmpty, DimensionMismatch
from .raster import as_mask, boundary_band

DEFAULT_BAND_DISTANCE = 4


@dataclass(frozen=True)
class BiouScore:
    """Boundary IoU value with the pixel counts it was computed from."""

    value: float
    d: int
    intersection_px: int
    union_px: int

    def to_json_dict(self) -> dict:
        return {
            "value": self.value,
            "d": self.d,
            "intersection_px": self.intersection_px,
            "union_px": self.union_px,
        }


def _band_restricted(mask: np.ndarray, d: int) -> np.ndarray:
    if not mask.any():
        return np.zeros_like(mask)
    return boundary_band(mask, d).band & mask


def biou(f, p, d: int = DEFAULT_BAND_DISTANCE) -> BiouScore:
    """Boundary IoU of a fitted mask ``f`` and a predicted mask ``p``.

    Symmetric in its mask arguments. Raises DimensionMismatch on unequal
    rasters and BothEmpty when both band-restricted sets are empty (both
    masks empty), where the ratio is undefined.
    """
    f = as_mask(f)
    p = as_mask(p)
    if f.shape != p.shape:
        raise DimensionMismatch(f"mask shapes differ: {f.shape} vs {p.shape}")
    if d < 1:
        raise ValueError(f"band distance must be >= 1, got {d}")
    f_near = _band_restricted(f, d)
    p_near = _band_restricted(p, d)
    intersection = int((f_near & p_near).sum())
    union = int((f_near | p_near).sum())
    if union == 0:
        raise BothEmpty("both masks are empty; boundary IoU is undefined")
    return BiouScore(
        value=intersection / union,
        d=int(d),
        intersection_px=intersection,
        union_px=union,
    )


def iou(f, p) -> float:
    """Plain intersection-over-union of two masks."""
    f = as_mask(f)
    p = as_mask(p)
    if f.shape != p.shape:
        raise DimensionMismatch(f"mask shapes differ: {f.shape} vs {p.shape}")
    intersection = int((f & p).sum())
    union = int((f | p).sum())
    if union == 0:
        raise BothEmpty("both masks are empty; IoU is undefined")
    return intersection / union
