"""Reading and writing data files, column scaling and raster images."""

import csv
from dataclasses import dataclass
from pathlib import Path
import re

import numpy as np

from ._validation import check_data, check_membership
from .exceptions import FileFormatError, ShapeError

# --------------------------------------------------------------------------
# CSV


def read_csv_matrix(path, has_header=False):
    """Read a comma-separated numeric matrix.

    Raises ``FileFormatError`` on an empty file, ragged rows or a cell that
    does not parse as a float; row and column numbers in messages are
    1-based and count the header line.
    """
    rows = []
    width = None
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, record in enumerate(csv.reader(fh), start=1):
            if has_header and lineno == 1:
                continue
            if not record or all(not cell.strip() for cell in record):
                continue
            if width is None:
                width = len(record)
            elif len(record) != width:
                raise FileFormatError(
                    f"{path}: row {lineno} has {len(record)} fields, expected {width}"
                )
            try:
                values = [float(cell) for cell in record]
            except ValueError:
                col = next(i for i, cell in enumerate(record, 1) if not _is_float(cell))
                raise FileFormatError(
                    f"{path}: row {lineno}, column {col}: cannot parse {record[col - 1]!r} as a number"
                ) from None
            rows.append(values)
    if not rows:
        raise FileFormatError(f"{path}: no data rows")
    data = np.array(rows, dtype=float)
    if not np.all(np.isfinite(data)):
        raise FileFormatError(f"{path}: matrix contains NaN or infinite values")
    return data


def _is_float(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def write_csv_matrix(path, matrix, header=None):
    """Write a matrix with shortest round-tripping float representation."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if header is not None:
            fh.write(",".join(header) + "\n")
        for row in matrix:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def write_labels_csv(path, membership):
    labels = check_membership(membership)
    if labels.size == 0:
        raise ValueError("membership is empty")
    Path(path).write_text("".join(f"{int(v)}\n" for v in labels), encoding="utf-8")


def read_labels_csv(path):
    """One non-negative integer label per line; gaps in the ids are allowed."""
    labels = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if not re.fullmatch(r"[+]?\d+", text):
                raise FileFormatError(f"{path}: line {lineno}: {text!r} is not a non-negative integer")
            labels.append(int(text))
    if not labels:
        raise FileFormatError(f"{path}: no labels")
    return np.array(labels, dtype=np.int64)


# --------------------------------------------------------------------------
# scaling


@dataclass(frozen=True)
class ColumnScaling:
    stds: np.ndarray

    def apply(self, data):
        return np.asarray(data, dtype=float) / self.stds

    def invert(self, data):
        return np.asarray(data, dtype=float) * self.stds


def scale_by_std(data):
    """Divide each column by its sample standard deviation (n - 1 denominator)."""
    data = check_data(data)
    if data.shape[0] < 2:
        raise ValueError("scaling needs at least two rows")
    stds = data.std(axis=0, ddof=1)
    zero = np.flatnonzero(stds == 0)
    if zero.size:
        raise ValueError(f"column {int(zero[0]) + 1} has zero variance and cannot be scaled")
    scaling = ColumnScaling(stds)
    return scaling.apply(data), scaling


# --------------------------------------------------------------------------
# images


@dataclass(frozen=True)
class RasterImage:
    """8-bit RGB image; ``pixels`` has shape (height, width, 3) and dtype uint8."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ShapeError(f"pixels must have shape (height, width, 3), got {px.shape}")
        if px.dtype != np.uint8:
            if np.any((px < 0) | (px > 255)) or not np.array_equal(px, np.round(px)):
                raise ValueError("pixel channels must be integers in [0, 255]")
            px = px.astype(np.uint8)
        object.__setattr__(self, "pixels", px)

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def width(self):
        return self.pixels.shape[1]

    def __eq__(self, other):
        return isinstance(other, RasterImage) and np.array_equal(self.pixels, other.pixels)

    __hash__ = None


_WS = b" \t\n\r\v\f"


def _header_tokens(raw, count):
    """First ``count`` whitespace-separated header tokens and the offset after them."""
    tokens = []
    pos = 0
    while len(tokens) < count:
        while pos < len(raw) and raw[pos] in _WS:
            pos += 1
        if pos < len(raw) and raw[pos] == ord("#"):
            while pos < len(raw) and raw[pos] not in b"\n\r":
                pos += 1
            continue
        start = pos
        while pos < len(raw) and raw[pos] not in _WS and raw[pos] != ord("#"):
            pos += 1
        if start == pos:
            raise FileFormatError("truncated PPM header")
        tokens.append(raw[start:pos])
    return tokens, pos


def decode_ppm(raw):
    if raw[:2] != b"P6":
        magic = raw[:2].decode("latin-1", "replace")
        raise FileFormatError(f"unsupported image format {magic!r}; only binary PPM (P6) is read")
    tokens, pos = _header_tokens(raw, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise FileFormatError("malformed PPM header") from None
    if maxval != 255:
        raise FileFormatError(f"PPM maxval must be 255, got {maxval}")
    if width < 1 or height < 1:
        raise FileFormatError("PPM dimensions must be positive")
    if pos >= len(raw) or raw[pos] not in _WS:
        raise FileFormatError("truncated PPM header")
    body = raw[pos + 1:]
    need = width * height * 3
    if len(body) < need:
        raise FileFormatError(f"truncated PPM pixel data: {len(body)} of {need} bytes")
    pixels = np.frombuffer(body[:need], dtype=np.uint8).reshape(height, width, 3).copy()
    return RasterImage(pixels)


def encode_ppm(image):
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(image.pixels, dtype=np.uint8).tobytes()


def read_ppm(path):
    return decode_ppm(Path(path).read_bytes())


def write_ppm(path, image):
    Path(path).write_bytes(encode_ppm(image))


def image_to_matrix(image):
    """Pixels as a (width*height) x 3 float matrix in row-major order."""
    return image.pixels.reshape(-1, 3).astype(float)


def _round_channels(values):
    values = np.asarray(values, dtype=float)
    if np.any(np.isnan(values)):
        raise ValueError("centroid channel is NaN")
    return np.clip(np.floor(values + 0.5), 0, 255).astype(np.uint8)


def recolor(image, membership, centroids):
    """Replace every pixel by its cluster's centroid color (rounded half up, clamped)."""
    centroids = np.asarray(centroids, dtype=float)
    if centroids.ndim != 2 or centroids.shape[1] != 3:
        raise ShapeError(f"centroids must be K x 3, got {centroids.shape}")
    labels = check_membership(membership, image.width * image.height, centroids.shape[0])
    colors = _round_channels(centroids)
    return RasterImage(colors[labels].reshape(image.height, image.width, 3))


def to_grayscale(image):
    """Luma ``round(0.299 R + 0.587 G + 0.114 B)`` replicated over three channels."""
    px = image.pixels.astype(float)
    luma = 0.299 * px[..., 0] + 0.587 * px[..., 1] + 0.114 * px[..., 2]
    gray = _round_channels(luma)
    return RasterImage(np.repeat(gray[..., None], 3, axis=2))
