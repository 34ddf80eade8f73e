"""Binary-mask primitives: components, boundaries, distance bands, segmentation.

Masks are 2-D boolean numpy arrays of shape (height, width); pixel (x, y)
lives at ``mask[y, x]``. Contours are integer (x, y) coordinate arrays.
Foreground components use 8-connectivity, background holes 4-connectivity,
the standard complementary pairing.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import EmptyMask, SegmentationFailed

_EIGHT = np.ones((3, 3), dtype=bool)
_FOUR = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


def as_mask(arr) -> np.ndarray:
    """Validate and return a 2-D boolean mask."""
    mask = np.asarray(arr)
    if mask.ndim != 2 or mask.shape[0] < 1 or mask.shape[1] < 1:
        raise ValueError(f"mask must be a non-empty 2-D raster, got shape {mask.shape}")
    if mask.dtype != bool:
        mask = mask.astype(bool)
    return mask


def largest_component(mask) -> np.ndarray:
    """Keep only the 8-connected foreground component with the most pixels.

    Ties are broken by the component whose top-left-most pixel (smallest
    (row, col)) comes first, so the result is deterministic.
    """
    mask = as_mask(mask)
    labels, count = ndimage.label(mask, structure=_EIGHT)
    if count == 0:
        raise EmptyMask("mask has no foreground pixels")
    sizes = np.bincount(labels.ravel())[1:]
    tied = np.flatnonzero(sizes == sizes.max()) + 1
    if len(tied) == 1:
        keep = tied[0]
    else:
        # argwhere scans row-major, so [0] is the top-left-most pixel
        keep = min(tied, key=lambda lab: tuple(np.argwhere(labels == lab)[0]))
    return labels == keep


def fill_holes(mask) -> np.ndarray:
    """Convert background regions not 4-connected to the raster border to foreground."""
    mask = as_mask(mask)
    bg_labels, count = ndimage.label(~mask, structure=_FOUR)
    if count == 0:
        return mask.copy()
    border = np.unique(
        np.concatenate(
            [bg_labels[0, :], bg_labels[-1, :], bg_labels[:, 0], bg_labels[:, -1]]
        )
    )
    holes = (bg_labels > 0) & ~np.isin(bg_labels, border)
    return mask | holes


def boundary_mask(mask) -> np.ndarray:
    """Outer-boundary pixels as a mask: foreground of the hole-filled input
    that is 8-adjacent to background or lies on the raster border."""
    mask = as_mask(mask)
    if not mask.any():
        raise EmptyMask("mask has no foreground pixels")
    filled = fill_holes(mask)
    interior = ndimage.binary_erosion(filled, structure=_EIGHT, border_value=0)
    return filled & ~interior


def outer_boundary(mask) -> np.ndarray:
    """Outer-boundary pixel coordinates as an (N, 2) integer array of (x, y).

    Interior holes are filled first so only the exterior boundary remains.
    Points are unique and ordered by raster scan.
    """
    edge = boundary_mask(mask)
    rc = np.argwhere(edge)
    return np.column_stack([rc[:, 1], rc[:, 0]])


@dataclass(frozen=True)
class BoundaryBand:
    """Pixels within Euclidean distance ``d`` of a mask's outer boundary."""

    source: np.ndarray
    d: int
    band: np.ndarray


def boundary_band(mask, d: int) -> BoundaryBand:
    """Exact Euclidean distance band of width ``d`` around the outer boundary.

    A pixel belongs to the band iff its distance to the nearest boundary
    pixel is <= d. Computed with an exact Euclidean distance transform.
    """
    mask = as_mask(mask)
    if d < 1:
        raise ValueError(f"band distance must be >= 1, got {d}")
    edge = boundary_mask(mask)
    dist = ndimage.distance_transform_edt(~edge)
    return BoundaryBand(source=mask, d=int(d), band=dist <= d)


def _erode(mask: np.ndarray) -> np.ndarray:
    # padding with foreground keeps border blobs intact (the border-touch
    # check below is what rejects them, not erosion artifacts)
    return ndimage.binary_erosion(mask, structure=_EIGHT, border_value=1)


def _dilate(mask: np.ndarray) -> np.ndarray:
    return ndimage.binary_dilation(mask, structure=_EIGHT, border_value=0)


def segment_pupil_classical(
    eye,
    dark_percentile: float = 8.0,
    min_area: int = 25,
) -> np.ndarray:
    """Threshold-and-morphology pupil segmenter for cropped eye images.

    Keeps pixels at or below the ``dark_percentile`` intensity, cleans them
    with a 3x3 open/close, keeps the largest component and fills its holes.

    Raises SegmentationFailed when the surviving component is smaller than
    ``min_area`` pixels or covers at least half of the crop border (a pupil
    should be an interior blob, not a frame).
    """
    img = np.asarray(eye)
    if img.ndim != 2 or img.size == 0:
        raise SegmentationFailed(f"expected a 2-D grayscale crop, got shape {img.shape}")
    threshold = np.percentile(img, dark_percentile)
    candidate = img <= threshold
    candidate = _dilate(_erode(candidate))  # open: drop specks
    candidate = _erode(_dilate(candidate))  # close: bridge pinholes
    if not candidate.any():
        raise SegmentationFailed("no dark component survived morphology")
    pupil = fill_holes(largest_component(candidate))
    area = int(pupil.sum())
    if area < min_area:
        raise SegmentationFailed(f"component area {area} px below minimum {min_area} px")
    border = np.zeros_like(pupil)
    border[[0, -1], :] = True
    border[:, [0, -1]] = True
    border_frac = float(pupil[border].mean())
    if border_frac >= 0.5:
        raise SegmentationFailed(
            f"component touches {border_frac:.0%} of the crop border"
        )
    return pupil
