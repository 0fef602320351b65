"""Grayscale image conventions, file I/O and geometric primitives.

Images are plain 2-D numpy float64 arrays of shape (h, w) with intensities
in [0, 255].  Files are 8-bit; quantization happens only at save time so the
frequency-domain filters can work in continuous range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image
from scipy import ndimage

# Rec. 601 luminance weights used when reading color PNGs
_LUMA = (0.299, 0.587, 0.114)

MAX_ROTATION_DEGREES = 45.0


class ImageError(ValueError):
    """Unreadable, unwritable or malformed image file."""


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class Band:
    """Half-open row range [row_start, row_end)."""

    row_start: int
    row_end: int

    def __post_init__(self):
        if not (0 <= self.row_start < self.row_end):
            raise ValueError(f"invalid band [{self.row_start}, {self.row_end})")

    @property
    def height(self) -> int:
        return self.row_end - self.row_start


def as_gray(arr) -> np.ndarray:
    """Validate and normalize an array to the (h, w) float64 convention."""
    a = np.asarray(arr, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ImageError(f"expected 2-D grayscale array, got shape {a.shape}")
    if not np.all(np.isfinite(a)) or a.min() < 0:
        raise ImageError("intensities must be finite and >= 0")
    return a


def _read_pgm(data: bytes) -> np.ndarray:
    if not data.startswith(b"P5"):
        raise ImageError("not a binary PGM (P5) file")
    # tokenize header, honoring '#' comments
    tokens = []
    i = 2
    while len(tokens) < 3:
        while i < len(data) and data[i : i + 1].isspace():
            i += 1
        if i < len(data) and data[i : i + 1] == b"#":
            while i < len(data) and data[i] != 0x0A:
                i += 1
            continue
        j = i
        while j < len(data) and not data[j : j + 1].isspace():
            j += 1
        if j == i:
            raise ImageError("truncated PGM header")
        tokens.append(data[i:j])
        i = j
    i += 1  # single whitespace after maxval
    w, h, maxval = (int(t) for t in tokens)
    if w < 1 or h < 1:
        raise ImageError("zero image dimension")
    if maxval != 255:
        raise ImageError(f"unsupported PGM maxval {maxval} (need 255)")
    raster = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=i)
    if raster.size != w * h:
        raise ImageError("truncated PGM raster")
    return raster.reshape(h, w).astype(np.float64)


def load_image(path) -> np.ndarray:
    """Load an 8-bit grayscale PGM (P5) or PNG; color PNG via luminance."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ImageError(f"cannot read {path}: {exc}") from exc
    if data.startswith(b"P5"):
        return _read_pgm(data)
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode == "L":
                arr = np.asarray(im, dtype=np.float64)
            elif im.mode in ("RGB", "RGBA", "P", "LA"):
                rgb = np.asarray(im.convert("RGB"), dtype=np.float64)
                arr = _LUMA[0] * rgb[..., 0] + _LUMA[1] * rgb[..., 1] + _LUMA[2] * rgb[..., 2]
            else:
                raise ImageError(f"unsupported image mode {im.mode!r}")
    except ImageError:
        raise
    except Exception as exc:
        raise ImageError(f"unsupported or corrupt image file {path}: {exc}") from exc
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ImageError("zero image dimension")
    return arr


def quantize(img) -> np.ndarray:
    """Clamp to [0, 255] and round half up to uint8."""
    a = np.clip(np.asarray(img, dtype=np.float64), 0.0, 255.0)
    return np.minimum(np.floor(a + 0.5), 255.0).astype(np.uint8)


def save_image(img, path) -> None:
    """Write as 8-bit PGM (.pgm) or grayscale PNG (anything else)."""
    path = Path(path)
    a = quantize(as_gray(img))
    h, w = a.shape
    try:
        if path.suffix.lower() == ".pgm":
            with open(path, "wb") as f:
                f.write(b"P5\n%d %d\n255\n" % (w, h))
                f.write(a.tobytes())
        else:
            Image.fromarray(a, mode="L").save(path)
    except OSError as exc:
        raise ImageError(f"cannot write {path}: {exc}") from exc


def rotate(img, degrees: float) -> np.ndarray:
    """Rotate about the image center with bilinear interpolation, 0-fill.

    Positive angles tilt vertical structures so their column position grows
    with the row index (slope = tan(degrees) columns per row).
    """
    a = np.asarray(img, dtype=np.float64)
    if not np.isfinite(degrees) or abs(degrees) > MAX_ROTATION_DEGREES:
        raise ValueError(f"rotation angle {degrees!r} outside ±{MAX_ROTATION_DEGREES}°")
    if degrees == 0:
        return a.copy()
    h, w = a.shape
    center = np.array([(h - 1) / 2.0, (w - 1) / 2.0])
    rad = math.radians(degrees)
    c, s = math.cos(rad), math.sin(rad)
    # output -> input map is the rotation by -degrees in (row, col) space
    matrix = np.array([[c, s], [-s, c]])
    out = ndimage.affine_transform(
        a, matrix, offset=center - matrix @ center, order=1, mode="constant", cval=0.0
    )
    return np.maximum(out, 0.0)


def middle_band(img) -> Band:
    """Middle-third row range: rows [round(h/3), round(2h/3)+1), round half up."""
    h = np.asarray(img).shape[0]
    if h < 3:
        raise ValueError(f"image too short for a middle band (h={h})")
    return Band(round_half_up(h / 3.0), round_half_up(2.0 * h / 3.0) + 1)
