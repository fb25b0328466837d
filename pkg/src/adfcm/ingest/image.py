from __future__ import annotations

import logging
from pathlib import Path
from typing import Union

import cv2
import numpy as np

from adfcm.errors import ParseError, ShapeMismatch
from adfcm.schema.models import Dataset, GrayImage, OutcomeSet
from adfcm.utils.io import write_outputs

LOGGER = logging.getLogger("adfcm_ingest")

PathLike = Union[str, Path]

MAXVAL = 255


# -----------------------------
# PGM codec
# -----------------------------
def decode_pgm(data: bytes) -> GrayImage:
    """
    Decode a P2 or P5 image. Anything OpenCV cannot read, colour images and
    16-bit rasters (maxval above 255) raise ParseError.
    """
    if not data.startswith((b"P2", b"P5")):
        raise ParseError(f"not a PGM file (magic {data[:2]!r})")
    try:
        pixels = cv2.imdecode(np.frombuffer(data, dtype=np.uint8), cv2.IMREAD_UNCHANGED)
    except cv2.error as e:
        raise ParseError(f"unreadable PGM: {e}") from e
    if pixels is None:
        raise ParseError("malformed or truncated PGM")
    if pixels.ndim != 2:
        raise ParseError(f"expected a single-channel image, got shape {pixels.shape}")
    if pixels.dtype != np.uint8:
        raise ParseError(f"only 8-bit PGM (maxval {MAXVAL}) is supported, got {pixels.dtype}")
    height, width = pixels.shape
    return GrayImage(width=width, height=height, pixels=pixels)


def _encode(img: GrayImage, binary: bool) -> bytes:
    pixels = np.ascontiguousarray(img.pixels, dtype=np.uint8)
    ok, buf = cv2.imencode(".pgm", pixels, [cv2.IMWRITE_PXM_BINARY, int(binary)])
    if not ok:
        raise ShapeMismatch(f"could not encode {img.width}x{img.height} image as PGM")
    return buf.tobytes()


def encode_pgm(img: GrayImage) -> bytes:
    return _encode(img, binary=True)


def encode_plain_pgm(img: GrayImage) -> bytes:
    return _encode(img, binary=False)


def load_pgm(path: PathLike) -> GrayImage:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(str(p))
    img = decode_pgm(p.read_bytes())
    LOGGER.info("Loaded %s: %dx%d", p.name, img.width, img.height)
    return img


def write_pgm(img: GrayImage, path: PathLike) -> None:
    write_outputs({Path(path): encode_pgm(img)})


# -----------------------------
# Image <-> dataset
# -----------------------------
def image_to_dataset(img: GrayImage) -> Dataset:
    """One record per pixel (row-major), single intensity feature scaled to [0, 1]."""
    rows, cols = np.indices((img.height, img.width))
    coords = np.column_stack([rows.ravel(), cols.ravel()])
    return Dataset(
        records=img.pixels.reshape(-1, 1).astype(float) / MAXVAL,
        feature_names=("intensity",),
        coords=coords,
        image_shape=(img.height, img.width),
    )


def _to_level(intensity: np.ndarray) -> np.ndarray:
    # [0, 1] -> [0, 255], rounded half up
    return np.clip(np.floor(np.asarray(intensity, dtype=float) * MAXVAL + 0.5), 0, MAXVAL).astype(np.uint8)


def dataset_to_image(dataset: Dataset, intensities: np.ndarray) -> GrayImage:
    """Reassemble per-record intensities in [0, 1] into an image using the pixel coordinates."""
    if dataset.coords is None or dataset.image_shape is None:
        raise ShapeMismatch("dataset was not built from an image")
    values = np.asarray(intensities, dtype=float).reshape(-1)
    if values.shape[0] != dataset.n_records:
        raise ShapeMismatch(f"{values.shape[0]} intensities for {dataset.n_records} pixels")
    height, width = dataset.image_shape
    pixels = np.zeros((height, width), dtype=np.uint8)
    pixels[dataset.coords[:, 0], dataset.coords[:, 1]] = _to_level(values)
    return GrayImage(width=width, height=height, pixels=pixels)


def render_segmentation(img: GrayImage, outcomes: OutcomeSet, centroids: np.ndarray) -> GrayImage:
    """
    Paint assigned pixels with their cluster's centroid intensity and
    ambiguous pixels pure black.
    """
    n_pixels = img.width * img.height
    if len(outcomes) != n_pixels:
        raise ShapeMismatch(f"{len(outcomes)} outcomes for {n_pixels} pixels")
    levels = _to_level(np.asarray(centroids, dtype=float)[:, 0])
    flat = levels[outcomes.dominant]
    flat[outcomes.ambiguous] = 0
    return GrayImage(width=img.width, height=img.height, pixels=flat.reshape(img.height, img.width))
