import io

import numpy as np
import pytest
from PIL import Image

from pupilscreen import MaskFormatError, decode_gray, decode_mask, encode_pgm, read_mask, write_mask


def png_bytes(array: np.ndarray, mode: str) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(array, mode=mode).save(buf, format="PNG")
    return buf.getvalue()


class TestPgm:
    def test_round_trip(self, tmp_path, rng):
        mask = rng.random((17, 23)) < 0.4
        path = tmp_path / "m.pgm"
        write_mask(path, mask)
        assert np.array_equal(read_mask(path), mask)

    def test_writer_emits_zero_and_255(self, tmp_path):
        mask = np.zeros((2, 3), dtype=bool)
        mask[0, 1] = True
        data = encode_pgm(mask)
        assert data.startswith(b"P5\n3 2\n255\n")
        assert set(data[len(b"P5\n3 2\n255\n"):]) == {0, 255}

    def test_byte_stable(self):
        mask = np.eye(5, dtype=bool)
        assert encode_pgm(mask) == encode_pgm(mask.copy())

    def test_comments_in_header(self):
        data = b"P5\n# a comment\n3 2\n# another\n255\n" + bytes(6)
        gray = decode_gray(data)
        assert gray.shape == (2, 3)

    def test_threshold_at_128(self):
        data = b"P5\n4 1\n255\n" + bytes([0, 127, 128, 255])
        assert decode_mask(data).tolist() == [[False, False, True, True]]

    def test_wrong_maxval_rejected(self):
        with pytest.raises(MaskFormatError):
            decode_gray(b"P5\n2 2\n65535\n" + bytes(8))

    def test_truncated_rejected(self):
        with pytest.raises(MaskFormatError):
            decode_gray(b"P5\n4 4\n255\n" + bytes(3))

    def test_garbage_rejected(self):
        with pytest.raises(MaskFormatError):
            decode_gray(b"GIF89a whatever")


class TestPng:
    def test_grayscale_png(self, rng):
        gray = (rng.random((9, 11)) * 255).astype(np.uint8)
        assert np.array_equal(decode_gray(png_bytes(gray, "L")), gray)

    def test_color_png_luma(self):
        rgb = np.zeros((2, 2, 3), dtype=np.uint8)
        rgb[0, 0] = (255, 0, 0)
        rgb[0, 1] = (0, 255, 0)
        rgb[1, 0] = (0, 0, 255)
        rgb[1, 1] = (200, 100, 50)
        gray = decode_gray(png_bytes(rgb, "RGB"))
        expected = np.rint(
            0.299 * rgb[..., 0].astype(float)
            + 0.587 * rgb[..., 1]
            + 0.114 * rgb[..., 2]
        ).astype(np.uint8)
        assert np.array_equal(gray, expected)

    def test_rgba_alpha_ignored(self):
        rgba = np.zeros((3, 3, 4), dtype=np.uint8)
        rgba[..., 0] = 210
        rgba[..., 3] = 7
        gray = decode_gray(png_bytes(rgba, "RGBA"))
        assert (gray == np.rint(0.299 * 210).astype(np.uint8)).all()

    def test_mask_round_trip_via_png(self, rng):
        mask = rng.random((12, 8)) < 0.5
        data = png_bytes(mask.astype(np.uint8) * 255, "L")
        assert np.array_equal(decode_mask(data), mask)

    def test_deep_bit_depth_rejected(self):
        buf = io.BytesIO()
        Image.new("I;16", (4, 4)).save(buf, format="PNG")
        with pytest.raises(MaskFormatError):
            decode_gray(buf.getvalue())
