"""Reading and writing mask/eye-crop rasters.

Supported inputs are binary PGM (P5, maxval 255) and PNG. Mask semantics:
pixel value >= 128 is foreground. Color PNGs are reduced to 8-bit grayscale
with the luma weights 0.299 R + 0.587 G + 0.114 B, rounded to nearest.
Mask writers always emit P5 with values {0, 255}, byte-stable for a given
array.
"""
from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import MaskFormatError

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _luma(rgb: np.ndarray) -> np.ndarray:
    gray = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.rint(gray).astype(np.uint8)


def _decode_pgm(data: bytes) -> np.ndarray:
    # P5 header: magic, then width/height/maxval tokens separated by
    # whitespace or '#' comments, then a single whitespace byte, then raw rows.
    pos = 2
    fields: list[int] = []
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        token = data[start:pos]
        if not token.isdigit():
            raise MaskFormatError(f"bad PGM header token {token!r}")
        fields.append(int(token))
    pos += 1  # single whitespace after maxval
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise MaskFormatError(f"bad PGM dimensions {width}x{height}")
    if maxval != 255:
        raise MaskFormatError(f"only maxval 255 PGM is supported, got {maxval}")
    pixels = data[pos : pos + width * height]
    if len(pixels) != width * height:
        raise MaskFormatError(
            f"PGM payload truncated: expected {width * height} bytes, got {len(pixels)}"
        )
    return np.frombuffer(pixels, dtype=np.uint8).reshape(height, width)


def _decode_png(data: bytes) -> np.ndarray:
    try:
        img = Image.open(io.BytesIO(data))
        img.load()
    except UnidentifiedImageError as exc:
        raise MaskFormatError("not a decodable PNG") from exc
    if img.mode in ("1", "L"):
        return np.asarray(img.convert("L"), dtype=np.uint8)
    if img.mode == "LA":
        return np.asarray(img.getchannel("L"), dtype=np.uint8)
    if img.mode in ("P", "RGB", "RGBA"):
        rgb = np.asarray(img.convert("RGBA"), dtype=np.float64)[..., :3]
        return _luma(rgb)
    raise MaskFormatError(f"unsupported PNG mode {img.mode!r}, need 8-bit gray or color")


def decode_gray(data: bytes) -> np.ndarray:
    """Decode PGM/PNG bytes to a 2-D uint8 grayscale array."""
    if data[:2] == b"P5":
        return _decode_pgm(data)
    if data[: len(_PNG_MAGIC)] == _PNG_MAGIC:
        return _decode_png(data)
    raise MaskFormatError("unrecognized raster format (need P5 PGM or PNG)")


def decode_mask(data: bytes) -> np.ndarray:
    """Decode PGM/PNG bytes to a boolean mask (value >= 128 is foreground)."""
    return decode_gray(data) >= 128


def encode_pgm(image: np.ndarray) -> bytes:
    """Encode a 2-D array (bool mask or uint8 grayscale) as binary PGM."""
    arr = np.asarray(image)
    if arr.ndim != 2 or arr.size == 0:
        raise MaskFormatError(f"can only encode a non-empty 2-D raster, got {arr.shape}")
    if arr.dtype == bool:
        arr = arr.astype(np.uint8) * 255
    elif arr.dtype != np.uint8:
        raise MaskFormatError(f"can only encode bool or uint8 rasters, got {arr.dtype}")
    height, width = arr.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    return header + arr.tobytes()


def read_gray(path) -> np.ndarray:
    return decode_gray(Path(path).read_bytes())


def read_mask(path) -> np.ndarray:
    return decode_mask(Path(path).read_bytes())


def write_mask(path, mask: np.ndarray) -> None:
    Path(path).write_bytes(encode_pgm(mask))
